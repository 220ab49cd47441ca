//! JSON input: what to compute, where, and for which atoms.
//!
//! A document may be split over several files; top-level keys of later files
//! replace those of earlier ones.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use cqed_core::atoms::{AtomSpec, Level, PhysicalConstants, SphericalDipole, TwoAtomConfig};
use cqed_core::electrostatic::StaticField;
use cqed_core::green::{CavityGeometry, ModeSumOptions, ReflectionSigns, SeriesOptions, ThresholdGuard};
use cqed_core::quadrature::{QuadSpec, SeriesSpec};
use cqed_core::vdw::{DerivativeRoute, GreenModel, VdwOptions};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    GreenModesum,
    GreenSeries,
    GreenImagfreq,
    VOff,
    VRes,
    VStatic,
    WOff,
    WRes,
    WStatic,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::GreenModesum => "green_modesum",
            Quantity::GreenSeries => "green_series",
            Quantity::GreenImagfreq => "green_imagfreq",
            Quantity::VOff => "v_off",
            Quantity::VRes => "v_res",
            Quantity::VStatic => "v_static",
            Quantity::WOff => "w_off",
            Quantity::WRes => "w_res",
            Quantity::WStatic => "w_static",
        }
    }

    /// Dimensionless parameters that fix an evaluation point. The dimensional
    /// energies take `r`, `d` from the system config and may sweep `r_over_d`
    /// at fixed `d`.
    pub fn parameters(self) -> &'static [Variable] {
        match self {
            Quantity::VStatic => &[Variable::ROverD],
            Quantity::WOff | Quantity::WRes | Quantity::WStatic => &[],
            _ => &[Variable::Kr, Variable::Kd],
        }
    }

    pub fn sweepable(self) -> &'static [Variable] {
        match self {
            Quantity::VStatic | Quantity::WOff | Quantity::WRes | Quantity::WStatic => &[Variable::ROverD],
            _ => &[Variable::Kr, Variable::Kd],
        }
    }

    pub fn needs_system(self) -> bool {
        matches!(self, Quantity::WOff | Quantity::WRes | Quantity::WStatic)
    }
}

/// `Kr`, `Kd` are in units of the reference wavenumber (`u` for the
/// imaginary-frequency tensor).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variable {
    Kr,
    Kd,
    #[serde(rename = "r_over_d")]
    ROverD,
}

impl Variable {
    pub fn name(self) -> &'static str {
        match self {
            Variable::Kr => "Kr",
            Variable::Kd => "Kd",
            Variable::ROverD => "r_over_d",
        }
    }

    fn parse(s: &str) -> Option<Variable> {
        [Variable::Kr, Variable::Kd, Variable::ROverD].into_iter().find(|v| v.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub variable: Variable,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(CliError::config("grid needs at least 2 points"));
        }
        if !(self.start.is_finite() && self.stop.is_finite() && self.start < self.stop) {
            return Err(CliError::config("grid needs finite start < stop"));
        }
        if self.start <= 0.0 {
            return Err(CliError::config("grid values must be positive"));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.points - 1;
        (0..=n)
            .map(|i| {
                let t = i as f64 / n as f64;
                let x = match self.spacing {
                    Spacing::Linear => self.start + t * (self.stop - self.start),
                    Spacing::Log => self.start * (self.stop / self.start).powf(t),
                };
                x.clamp(self.start, self.stop)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Relative tolerance of quadratures and series.
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum reflection order of the series representation.
    pub m_max: usize,
    /// Half-width of the excluded band around `kd/pi = n`.
    pub guard_band: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rel_tol: 1e-9, abs_tol: 1e-300, m_max: 500, guard_band: ThresholdGuard::default().width }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(CliError::config("rel_tol must lie in (0, 1)"));
        }
        if !(self.abs_tol > 0.0) {
            return Err(CliError::config("abs_tol must be positive"));
        }
        if self.m_max < 1 {
            return Err(CliError::config("m_max must be at least 1"));
        }
        if !(self.guard_band >= 0.0 && self.guard_band < 0.5) {
            return Err(CliError::config("guard_band must lie in [0, 0.5)"));
        }
        Ok(())
    }

    pub fn quad(&self) -> QuadSpec {
        QuadSpec { rel_tol: self.rel_tol, abs_tol: self.abs_tol, ..QuadSpec::default() }
    }

    pub fn modesum(&self) -> ModeSumOptions {
        ModeSumOptions { guard: ThresholdGuard { width: self.guard_band }, ..ModeSumOptions::default() }
    }

    pub fn series(&self, signs: ReflectionSigns) -> SeriesOptions {
        SeriesOptions { m_max: self.m_max, quad: self.quad(), signs, ..SeriesOptions::default() }
    }

    /// The static ratios differ from 1 by as little as 1e-10 at small r/d;
    /// the series runs well below that regardless of `rel_tol`.
    pub fn static_series(&self) -> SeriesSpec {
        SeriesSpec { rel_tol: self.rel_tol.min(1e-14), ..SeriesSpec::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FrequencyUnit {
    #[default]
    #[serde(rename = "rad/s")]
    RadPerSecond,
    #[serde(rename = "Hz")]
    Hertz,
    #[serde(rename = "eV")]
    ElectronVolt,
}

impl FrequencyUnit {
    pub fn to_rad_per_second(self, x: f64, constants: &PhysicalConstants) -> f64 {
        const ELECTRON_VOLT: f64 = 1.602_176_634e-19;
        match self {
            FrequencyUnit::RadPerSecond => x,
            FrequencyUnit::Hertz => 2.0 * std::f64::consts::PI * x,
            FrequencyUnit::ElectronVolt => x * ELECTRON_VOLT / constants.hbar,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LengthUnit {
    #[default]
    #[serde(rename = "m")]
    Metre,
    #[serde(rename = "mm")]
    Millimetre,
    #[serde(rename = "um")]
    Micrometre,
    #[serde(rename = "nm")]
    Nanometre,
}

impl LengthUnit {
    pub fn metres(self) -> f64 {
        match self {
            LengthUnit::Metre => 1.0,
            LengthUnit::Millimetre => 1e-3,
            LengthUnit::Micrometre => 1e-6,
            LengthUnit::Nanometre => 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DipoleUnit {
    #[default]
    #[serde(rename = "C m")]
    CoulombMetre,
    /// Atomic units, `e a0`.
    #[serde(rename = "e a0")]
    Atomic,
}

impl DipoleUnit {
    pub fn coulomb_metres(self) -> f64 {
        match self {
            DipoleUnit::CoulombMetre => 1.0,
            DipoleUnit::Atomic => 8.478_353_625_5e-30,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelJson {
    pub index: u32,
    pub omega: f64,
    #[serde(default)]
    pub unit: FrequencyUnit,
}

/// `<from|d|to>`, either spherical (`d0`, `dplus`, `dminus`) or Cartesian
/// (`dx`, `dy`, `dz`); components are `[re, im]`, missing ones are zero. The
/// reverse element is filled in as the Hermitian partner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DipoleJson {
    pub from: u32,
    pub to: u32,
    pub d0: Option<[f64; 2]>,
    pub dplus: Option<[f64; 2]>,
    pub dminus: Option<[f64; 2]>,
    pub dx: Option<[f64; 2]>,
    pub dy: Option<[f64; 2]>,
    pub dz: Option<[f64; 2]>,
}

impl DipoleJson {
    fn to_spherical(self, scale: f64) -> Result<SphericalDipole> {
        let c = |z: Option<[f64; 2]>| z.map_or(Complex64::new(0.0, 0.0), |[re, im]| Complex64::new(re, im) * scale);
        let spherical = self.d0.is_some() || self.dplus.is_some() || self.dminus.is_some();
        let cartesian = self.dx.is_some() || self.dy.is_some() || self.dz.is_some();
        match (spherical, cartesian) {
            (true, true) => Err(CliError::config(format!(
                "dipole {}-{}: give spherical or Cartesian components, not both",
                self.from, self.to
            ))),
            (false, true) => Ok(SphericalDipole::from_cartesian(c(self.dx), c(self.dy), c(self.dz))),
            _ => Ok(SphericalDipole::new(c(self.d0), c(self.dplus), c(self.dminus))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomJson {
    pub label: String,
    pub levels: Vec<LevelJson>,
    #[serde(default)]
    pub dipoles: Vec<DipoleJson>,
    #[serde(default)]
    pub dipole_unit: DipoleUnit,
}

impl AtomJson {
    pub fn build(&self, constants: &PhysicalConstants) -> Result<AtomSpec> {
        if self.levels.is_empty() {
            return Err(CliError::config(format!("atom {}: no levels", self.label)));
        }
        let levels = self
            .levels
            .iter()
            .map(|l| Level { index: l.index, omega: l.unit.to_rad_per_second(l.omega, constants) })
            .collect();
        let mut atom = AtomSpec::new(self.label.clone(), levels);
        let mut seen = BTreeSet::new();
        for d in &self.dipoles {
            if !seen.insert((d.from.min(d.to), d.from.max(d.to))) {
                return Err(CliError::config(format!("atom {}: dipole {}-{} given twice", self.label, d.from, d.to)));
            }
            atom = atom.with_transition(d.from, d.to, d.to_spherical(self.dipole_unit.coulomb_metres())?);
        }
        let violations = atom.violations();
        if !violations.is_empty() {
            return Err(CliError::config(format!("atom {}: {violations:?}", self.label)));
        }
        Ok(atom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelJson {
    #[default]
    Cavity,
    FreeSpace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeJson {
    #[default]
    Analytic,
    FiniteDifference,
}

/// Geometry and states. Atom A is `atoms[0]` (or the atom labelled
/// `atom_a`), atom B is `atoms[1]` if present, else the same species.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfigJson {
    pub state_a: u32,
    pub state_b: u32,
    pub r: f64,
    pub d: f64,
    #[serde(default)]
    pub length_unit: LengthUnit,
    pub atom_a: Option<String>,
    pub atom_b: Option<String>,
    #[serde(default)]
    pub model: ModelJson,
    #[serde(default)]
    pub derivative: DerivativeJson,
}

/// Static field in V/m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldJson {
    #[serde(default)]
    pub x: f64,
    #[serde(default)]
    pub y: f64,
    #[serde(default)]
    pub z: f64,
}

impl FieldJson {
    pub fn build(&self) -> Result<StaticField> {
        Ok(StaticField::from_cartesian(self.x, self.y, self.z)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputJson {
    pub path: Option<String>,
    #[serde(default)]
    pub format: Format,
    /// Also write a gnuplot script next to the data file.
    #[serde(default)]
    pub plot_script: bool,
}

/// One input document, for `eval` (uses `point`) or `sweep` (uses `grid`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputFile {
    pub quantity: Quantity,
    #[serde(default)]
    pub point: BTreeMap<String, f64>,
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub fixed: BTreeMap<String, f64>,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Add free-space columns next to the cavity values.
    #[serde(default)]
    pub free_reference: bool,
    /// `v_static` only: divide by the free-space values.
    #[serde(default)]
    pub normalize: bool,
    #[serde(default)]
    pub atoms: Vec<AtomJson>,
    pub config: Option<SystemConfigJson>,
    pub field: Option<FieldJson>,
    #[serde(default)]
    pub output: OutputJson,
}

impl InputFile {
    pub fn load(paths: &[impl AsRef<Path>]) -> Result<InputFile> {
        let mut merged = serde_json::Map::new();
        for p in paths {
            let p = p.as_ref();
            let text = std::fs::read_to_string(p).map_err(|e| CliError::config(format!("{}: {e}", p.display())))?;
            match serde_json::from_str::<Value>(&text).map_err(|e| CliError::config(format!("{}: {e}", p.display())))? {
                Value::Object(m) => merged.extend(m),
                _ => return Err(CliError::config(format!("{}: top level must be an object", p.display()))),
            }
        }
        Self::from_value(Value::Object(merged))
    }

    pub fn parse(text: &str) -> Result<InputFile> {
        Self::from_value(serde_json::from_str(text)?)
    }

    fn from_value(v: Value) -> Result<InputFile> {
        let input: InputFile = serde_json::from_value(v)?;
        input.check()?;
        Ok(input)
    }

    pub fn check(&self) -> Result<()> {
        self.tolerances.validate()?;
        if self.quantity.needs_system() && (self.config.is_none() || self.atoms.is_empty()) {
            return Err(CliError::config(format!("{} needs \"atoms\" and \"config\"", self.quantity.name())));
        }
        if self.quantity == Quantity::WStatic && self.field.is_none() {
            return Err(CliError::config("w_static needs a \"field\" block"));
        }
        if self.normalize && self.quantity != Quantity::VStatic {
            return Err(CliError::config("normalize applies to v_static only"));
        }
        Ok(())
    }

    fn parse_map(&self, map: &BTreeMap<String, f64>, what: &str, allowed: &[Variable]) -> Result<BTreeMap<Variable, f64>> {
        let mut out = BTreeMap::new();
        for (k, &v) in map {
            let var = Variable::parse(k).filter(|v| allowed.contains(v)).ok_or_else(|| {
                CliError::config(format!("{what}: {k} is not a parameter of {}", self.quantity.name()))
            })?;
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::config(format!("{what}: {k} must be positive and finite")));
            }
            out.insert(var, v);
        }
        Ok(out)
    }

    /// The evaluation point of `eval`: `point` merged over `fixed`.
    pub fn eval_point(&self) -> Result<BTreeMap<Variable, f64>> {
        let allowed = self.quantity.parameters();
        let mut p = self.parse_map(&self.fixed, "fixed", allowed)?;
        p.extend(self.parse_map(&self.point, "point", allowed)?);
        self.check_complete(&p)?;
        Ok(p)
    }

    /// Swept grid and the fixed parameters.
    pub fn sweep_plan(&self) -> Result<(GridSpec, BTreeMap<Variable, f64>)> {
        let grid = self.grid.clone().ok_or_else(|| CliError::config("sweep needs a \"grid\" block"))?;
        grid.validate()?;
        if !self.quantity.sweepable().contains(&grid.variable) {
            return Err(CliError::config(format!("{} cannot be swept for {}", grid.variable.name(), self.quantity.name())));
        }
        let fixed = self.parse_map(&self.fixed, "fixed", self.quantity.parameters())?;
        if fixed.contains_key(&grid.variable) {
            return Err(CliError::config("fixed parameters must not include the swept variable"));
        }
        let mut probe = fixed.clone();
        probe.insert(grid.variable, grid.start);
        self.check_complete(&probe)?;
        Ok((grid, fixed))
    }

    fn check_complete(&self, p: &BTreeMap<Variable, f64>) -> Result<()> {
        for v in self.quantity.parameters() {
            if !p.contains_key(v) {
                return Err(CliError::config(format!("missing parameter {} for {}", v.name(), self.quantity.name())));
            }
        }
        Ok(())
    }

    pub fn system(&self) -> Result<System> {
        let cfg = self.config.as_ref().ok_or_else(|| CliError::config("missing \"config\" block"))?;
        System::new(&self.atoms, cfg, &self.tolerances)
    }
}

/// Atoms, states and options of a dimensional evaluation.
#[derive(Debug, Clone)]
pub struct System {
    pub base: TwoAtomConfig,
    pub options: VdwOptions,
}

impl System {
    pub fn new(atoms: &[AtomJson], cfg: &SystemConfigJson, tol: &Tolerances) -> Result<System> {
        let constants = PhysicalConstants::CODATA2018;
        let pick = |label: &Option<String>, default: usize| -> Result<Option<&AtomJson>> {
            match label {
                Some(l) => atoms
                    .iter()
                    .find(|a| &a.label == l)
                    .map(Some)
                    .ok_or_else(|| CliError::config(format!("no atom labelled {l}"))),
                None => Ok(atoms.get(default)),
            }
        };
        let a = pick(&cfg.atom_a, 0)?.ok_or_else(|| CliError::config("\"atoms\" is empty"))?;
        let b = pick(&cfg.atom_b, 1)?.unwrap_or(a);
        let m = cfg.length_unit.metres();
        let geometry = CavityGeometry::new(cfg.r * m, cfg.d * m)
            .map_err(|e| CliError::config(format!("config: r and d must be positive ({e})")))?;
        let base = TwoAtomConfig {
            atom_a: a.build(&constants)?,
            atom_b: b.build(&constants)?,
            state_a: cfg.state_a,
            state_b: cfg.state_b,
            geometry,
        };
        let report = base.validate();
        if !report.is_valid() {
            return Err(CliError::config(format!("invalid two-atom config: {:?}", report.violations)));
        }
        let options = VdwOptions {
            constants,
            quad: tol.quad(),
            modesum: tol.modesum(),
            model: match cfg.model {
                ModelJson::Cavity => GreenModel::Cavity,
                ModelJson::FreeSpace => GreenModel::FreeSpace,
            },
            derivative: match cfg.derivative {
                DerivativeJson::Analytic => DerivativeRoute::Analytic,
                DerivativeJson::FiniteDifference => DerivativeRoute::FiniteDifference,
            },
            ..VdwOptions::default()
        };
        Ok(System { base, options })
    }

    /// The configuration with `r = ratio * d`.
    pub fn at_ratio(&self, ratio: f64) -> Result<TwoAtomConfig> {
        let d = self.base.geometry.d();
        Ok(TwoAtomConfig { geometry: CavityGeometry::new(ratio * d, d)?, ..self.base.clone() })
    }
}
