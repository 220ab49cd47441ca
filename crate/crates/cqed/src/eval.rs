//! Single-point evaluation of every quantity the CLI can tabulate.

use std::collections::BTreeMap;

use cqed_core::atoms::Scenario;
use cqed_core::electrostatic::{v_static_dimensionless, v_static_free, w_static_full, StaticField};
use cqed_core::green::{
    free_space_green, free_space_green_imag, green_imaginary_freq_with, green_modesum, green_reflection_series,
    CartesianGreen, CavityGeometry, ImagFreqMethod, ReflectionSigns,
};
use cqed_core::vdw::{
    v_off_dimensionless, v_off_free, v_res_dimensionless, v_res_free, w_off_full, w_res_one_excited,
    w_res_two_excited_dissimilar, w_res_two_excited_identical, EnergyResult, GreenModel, PotentialTensor, VdwOptions,
};
use cqed_core::atoms::TwoAtomConfig;
use num_complex::Complex64;

use crate::config::{InputFile, Quantity, System, Tolerances, Variable};
use crate::error::{CliError, Result};

/// Everything needed to evaluate one quantity at many points.
#[derive(Debug, Clone)]
pub struct Evaluator {
    pub quantity: Quantity,
    pub tolerances: Tolerances,
    pub signs: ReflectionSigns,
    pub free_reference: bool,
    pub normalize: bool,
    pub system: Option<System>,
    pub field: Option<StaticField>,
}

/// One evaluated point: values in the order of [`Evaluator::columns`].
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub values: Vec<f64>,
    pub diagnostics: String,
    pub energy: Option<EnergyResult>,
}

const COMPONENTS: [&str; 3] = ["pm", "pp", "00"];

impl Evaluator {
    pub fn new(input: &InputFile, signs: ReflectionSigns) -> Result<Evaluator> {
        let system = if input.quantity.needs_system() { Some(input.system()?) } else { None };
        let field = match (&input.field, input.quantity) {
            (Some(f), Quantity::WStatic) => Some(f.build()?),
            _ => None,
        };
        if input.free_reference && input.quantity == Quantity::WStatic {
            return Err(CliError::config("w_static has no free-space reference"));
        }
        Ok(Evaluator {
            quantity: input.quantity,
            tolerances: input.tolerances,
            signs,
            free_reference: input.free_reference,
            normalize: input.normalize,
            system,
            field,
        })
    }

    pub fn columns(&self) -> Vec<String> {
        let green = || ["re_par", "im_par", "re_perp", "im_perp", "re_zz", "im_zz"].map(String::from).to_vec();
        let energies = || ["w_a", "w_b", "phase_shift", "phase_rate"].map(String::from).to_vec();
        let tensor = |prefix: &str| COMPONENTS.iter().map(|c| format!("{prefix}_{c}")).collect::<Vec<_>>();
        let main = match self.quantity {
            Quantity::GreenModesum | Quantity::GreenSeries => green(),
            Quantity::GreenImagfreq => ["par", "perp", "zz"].map(String::from).to_vec(),
            Quantity::VOff => tensor("v"),
            Quantity::VRes => [tensor("va"), tensor("vb")].concat(),
            Quantity::VStatic if self.normalize => tensor("ratio"),
            Quantity::VStatic => tensor("v"),
            Quantity::WOff | Quantity::WRes | Quantity::WStatic => energies(),
        };
        if self.free_reference {
            let free = main.iter().map(|c| format!("free_{c}")).collect::<Vec<_>>();
            [main, free].concat()
        } else {
            main
        }
    }

    /// The dimensional quantities are evaluated at `r = r_over_d * d` when
    /// `r_over_d` is given, else at the configured geometry.
    pub fn eval(&self, p: &BTreeMap<Variable, f64>) -> Result<Row> {
        let kr = || p[&Variable::Kr];
        let kd = || p[&Variable::Kd];
        let tol = &self.tolerances;
        let mut diag = Vec::new();
        let (main, free, energy): (Vec<f64>, Vec<f64>, Option<EnergyResult>) = match self.quantity {
            Quantity::GreenModesum => {
                let g = green_modesum(&CavityGeometry::new(kr(), kd())?, 1.0, &tol.modesum())?;
                (green_cols(g), self.free(|| Ok(green_cols(free_space_green(kr(), 1.0)?)))?, None)
            }
            Quantity::GreenSeries => {
                let s = green_reflection_series(&CavityGeometry::new(kr(), kd())?, 1.0, &tol.series(self.signs))?;
                diag.push(format!("m_used={}", s.m_used));
                diag.push(format!("truncation={:e}", s.truncation));
                (green_cols(s.value), self.free(|| Ok(green_cols(free_space_green(kr(), 1.0)?)))?, None)
            }
            Quantity::GreenImagfreq => {
                let geom = CavityGeometry::new(kr(), kd())?;
                let g = green_imaginary_freq_with(&geom, 1.0, ImagFreqMethod::Auto, &tol.quad())?;
                (g.to_array().to_vec(), self.free(|| Ok(free_space_green_imag(kr(), 1.0)?.to_array().to_vec()))?, None)
            }
            Quantity::VOff => {
                let v = v_off_dimensionless(&CavityGeometry::new(kr(), kd())?, 1.0, &tol.quad())?;
                (tensor_cols(&v), self.free(|| Ok(tensor_cols(&v_off_free(kr(), &tol.quad())?)))?, None)
            }
            Quantity::VRes => {
                let (a, b) = v_res_dimensionless(&CavityGeometry::new(kr(), kd())?, 1.0, &tol.modesum())?;
                let free = self.free(|| {
                    let (fa, fb) = v_res_free(kr())?;
                    Ok([tensor_cols(&fa), tensor_cols(&fb)].concat())
                })?;
                ([tensor_cols(&a), tensor_cols(&b)].concat(), free, None)
            }
            Quantity::VStatic => {
                let geom = CavityGeometry::new(p[&Variable::ROverD], 1.0)?;
                let v = v_static_dimensionless(&geom, &tol.static_series())?;
                let f = v_static_free(&geom);
                diag.push(format!("n_used={}/{}/{}", v.n_used[2], v.n_used[1], v.n_used[0]));
                if v.free_limit {
                    diag.push(format!("free_limit error_bound={:e}", v.error_bound));
                }
                let (vc, fc) = ([v.vpm, v.vpp, v.v00], [f.vpm, f.vpp, f.v00]);
                let main = if self.normalize { vc.iter().zip(fc).map(|(a, b)| a / b).collect() } else { vc.to_vec() };
                let free = if self.normalize { vec![1.0; 3] } else { fc.to_vec() };
                (main, if self.free_reference { free } else { Vec::new() }, None)
            }
            Quantity::WOff | Quantity::WRes | Quantity::WStatic => {
                let system = self.system.as_ref().ok_or_else(|| CliError::config("missing atomic system"))?;
                let cfg = match p.get(&Variable::ROverD) {
                    Some(&x) => system.at_ratio(x)?,
                    None => system.base.clone(),
                };
                let e = self.energy(&cfg, &system.options)?;
                let free = self.free(|| {
                    let opts = VdwOptions { model: GreenModel::FreeSpace, ..system.options };
                    Ok(energy_cols(&self.energy(&cfg, &opts)?, opts.constants.hbar))
                })?;
                if !e.skipped.is_empty() {
                    diag.push(format!("skipped_channels={}", e.skipped.len()));
                }
                (energy_cols(&e, system.options.constants.hbar), free, Some(e))
            }
        };
        Ok(Row { values: [main, free].concat(), diagnostics: diag.join(";"), energy })
    }

    fn free(&self, f: impl FnOnce() -> Result<Vec<f64>>) -> Result<Vec<f64>> {
        if self.free_reference {
            f()
        } else {
            Ok(Vec::new())
        }
    }

    fn energy(&self, cfg: &TwoAtomConfig, opts: &VdwOptions) -> Result<EnergyResult> {
        Ok(match self.quantity {
            Quantity::WOff => w_off_full(cfg, opts)?,
            Quantity::WRes => match cfg.validate().into_result()? {
                Scenario::BothGround => {
                    return Err(CliError::config("w_res needs at least one excited atom; use w_off for two ground-state atoms"))
                }
                Scenario::OneExcited { .. } => w_res_one_excited(cfg, opts)?,
                Scenario::BothExcitedDissimilar => w_res_two_excited_dissimilar(cfg, opts)?,
                Scenario::BothExcitedIdentical => w_res_two_excited_identical(cfg, opts)?,
            },
            Quantity::WStatic => {
                let field = self.field.as_ref().ok_or_else(|| CliError::config("w_static needs a field"))?;
                w_static_full(cfg, field, &self.tolerances.static_series(), &opts.constants)?
            }
            _ => unreachable!("not an energy"),
        })
    }
}

fn green_cols(g: CartesianGreen<Complex64>) -> Vec<f64> {
    g.to_array().iter().flat_map(|z| [z.re, z.im]).collect()
}

fn tensor_cols(v: &PotentialTensor) -> Vec<f64> {
    v.to_array().to_vec()
}

fn energy_cols(e: &EnergyResult, hbar: f64) -> Vec<f64> {
    vec![e.w_a, e.w_b, e.phase_shift, e.phase_shift_rate(hbar)]
}
