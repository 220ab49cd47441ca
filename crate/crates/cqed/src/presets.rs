//! Built-in sweeps behind the published figures.

use std::collections::BTreeMap;

use crate::config::{GridSpec, InputFile, OutputJson, Quantity, Spacing, Tolerances, Variable};

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
}

pub const PRESETS: [Preset; 4] = [
    Preset { name: "fig4", description: "v_off at Kr = 0.2, Kd log-spaced over [0.02, 20], 200 points, with free-space reference" },
    Preset { name: "fig6-d2", description: "v_res at Kd = 2, Kr linear over [0.2, 20], 400 points, with free-space reference" },
    Preset { name: "fig6-d20", description: "v_res at Kd = 20, Kr linear over [0.2, 20], 400 points, with free-space reference" },
    Preset { name: "fig7", description: "v_static divided by its free-space forms, r/d log-spaced over [0.01, 10], 200 points" },
];

fn sweep(quantity: Quantity, grid: GridSpec, fixed: &[(Variable, f64)]) -> InputFile {
    InputFile {
        quantity,
        point: BTreeMap::new(),
        grid: Some(grid),
        fixed: fixed.iter().map(|(k, v)| (k.name().to_string(), *v)).collect(),
        tolerances: Tolerances::default(),
        free_reference: quantity != Quantity::VStatic,
        normalize: quantity == Quantity::VStatic,
        atoms: Vec::new(),
        config: None,
        field: None,
        output: OutputJson::default(),
    }
}

pub fn preset(name: &str) -> Option<InputFile> {
    let grid = |variable, start, stop, points, spacing| GridSpec { variable, start, stop, points, spacing };
    let fig6 = |kd| sweep(Quantity::VRes, grid(Variable::Kr, 0.2, 20.0, 400, Spacing::Linear), &[(Variable::Kd, kd)]);
    Some(match name {
        "fig4" => sweep(Quantity::VOff, grid(Variable::Kd, 0.02, 20.0, 200, Spacing::Log), &[(Variable::Kr, 0.2)]),
        "fig6-d2" => fig6(2.0),
        "fig6-d20" => fig6(20.0),
        "fig7" => sweep(Quantity::VStatic, grid(Variable::ROverD, 0.01, 10.0, 200, Spacing::Log), &[]),
        _ => return None,
    })
}
