//! Two-atom configurations: levels, transition dipoles, scenario
//! classification and the perturbative-regime check.
//!
//! Dipoles are stored in the spherical basis `d^0 = d_z`,
//! `d^+- = (d_x -+ i d_y)/sqrt2`, with the bilinear contraction
//! `a.G.b = a0 b0 G00 + (a+ b+ + a- b-) G++ + (a+ b- + a- b+) G+-`
//! (so `G+-` couples `d+` with `d-`). With this convention
//! `<j|d|i>` has components `(conj d0, conj d-, conj d+)` of `<i|d|j>`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::green::{CavityGeometry, SphericalGreen};

/// SI constants (CODATA 2018).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub epsilon0: f64,
    pub c: f64,
}

impl PhysicalConstants {
    pub const CODATA2018: PhysicalConstants =
        PhysicalConstants { hbar: 1.054_571_817e-34, epsilon0: 8.854_187_812_8e-12, c: 299_792_458.0 };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA2018
    }
}

/// Transition dipole `<from|d|to>` in the spherical basis (C m).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SphericalDipole {
    pub zero: Complex64,
    pub plus: Complex64,
    pub minus: Complex64,
}

impl SphericalDipole {
    pub fn new(zero: Complex64, plus: Complex64, minus: Complex64) -> Self {
        SphericalDipole { zero, plus, minus }
    }

    pub fn from_cartesian(x: Complex64, y: Complex64, z: Complex64) -> Self {
        let i = Complex64::new(0.0, 1.0);
        SphericalDipole { zero: z, plus: (x - i * y) * FRAC_1_SQRT_2, minus: (x + i * y) * FRAC_1_SQRT_2 }
    }

    /// Matrix element of the reversed transition.
    pub fn hermitian_partner(&self) -> Self {
        SphericalDipole { zero: self.zero.conj(), plus: self.minus.conj(), minus: self.plus.conj() }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.zero.norm_sqr() + self.plus.norm_sqr() + self.minus.norm_sqr()
    }

    pub fn is_zero(&self) -> bool {
        self.norm_sqr() == 0.0
    }

    /// `self . G . other`.
    pub fn contract<T>(&self, g: &SphericalGreen<T>, other: &SphericalDipole) -> Complex64
    where
        T: Copy + Into<Complex64>,
    {
        self.zero * other.zero * g.zz.into()
            + (self.plus * other.plus + self.minus * other.minus) * g.pp.into()
            + (self.plus * other.minus + self.minus * other.plus) * g.pm.into()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    pub index: u32,
    /// Angular frequency (rad/s).
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomSpec {
    pub label: String,
    pub levels: Vec<Level>,
    /// `(i, j) -> <i|d|j>`.
    pub dipoles: BTreeMap<(u32, u32), SphericalDipole>,
}

impl AtomSpec {
    pub fn new(label: impl Into<String>, levels: Vec<Level>) -> Self {
        AtomSpec { label: label.into(), levels, dipoles: BTreeMap::new() }
    }

    /// Stores `<from|d|to>` together with its Hermitian partner.
    pub fn with_transition(mut self, from: u32, to: u32, d: SphericalDipole) -> Self {
        self.dipoles.insert((from, to), d);
        self.dipoles.insert((to, from), d.hermitian_partner());
        self
    }

    pub fn level(&self, index: u32) -> Option<&Level> {
        self.levels.iter().find(|l| l.index == index)
    }

    pub fn omega(&self, index: u32) -> Result<f64> {
        self.level(index).map(|l| l.omega).ok_or(Error::InvalidInput("unknown level index"))
    }

    /// `<i|d|j>`, zero when no coupling is listed.
    pub fn dipole(&self, i: u32, j: u32) -> SphericalDipole {
        self.dipoles.get(&(i, j)).copied().unwrap_or_default()
    }

    pub fn ground(&self) -> Option<u32> {
        self.levels.iter().map(|l| l.index).min()
    }

    /// Levels coupled to `state` by a non-zero dipole, in index order.
    pub fn coupled_to(&self, state: u32) -> Vec<u32> {
        let mut v: Vec<u32> =
            self.levels.iter().map(|l| l.index).filter(|&i| i != state && !self.dipole(state, i).is_zero()).collect();
        v.sort_unstable();
        v
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.levels.is_empty() {
            out.push(Violation::NoLevels);
        }
        let mut sorted = self.levels.clone();
        sorted.sort_by_key(|l| l.index);
        for w in sorted.windows(2) {
            if w[0].index == w[1].index {
                out.push(Violation::DuplicateLevel(w[0].index));
            } else if w[1].omega < w[0].omega {
                out.push(Violation::FrequencyOrder { lower: w[0].index, upper: w[1].index });
            }
        }
        for l in &self.levels {
            if !l.omega.is_finite() {
                out.push(Violation::NonFiniteFrequency(l.index));
            }
        }
        for (&(i, j), d) in &self.dipoles {
            if i == j {
                out.push(Violation::SelfDipole(i));
                continue;
            }
            if self.level(i).is_none() || self.level(j).is_none() {
                out.push(Violation::UnknownLevel { from: i, to: j });
                continue;
            }
            let finite = [d.zero, d.plus, d.minus].iter().all(|z| z.re.is_finite() && z.im.is_finite());
            if !finite {
                out.push(Violation::NonFiniteDipole { from: i, to: j });
            }
            match self.dipoles.get(&(j, i)) {
                None => out.push(Violation::MissingPartner { from: i, to: j }),
                Some(p) if i < j => {
                    let want = d.hermitian_partner();
                    let scale = d.norm_sqr().sqrt();
                    let diff = [p.zero - want.zero, p.plus - want.plus, p.minus - want.minus];
                    if diff.iter().any(|z| z.norm() > 1e-12 * scale) {
                        out.push(Violation::NotHermitian { from: i, to: j });
                    }
                }
                Some(_) => {}
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    NoLevels,
    DuplicateLevel(u32),
    FrequencyOrder { lower: u32, upper: u32 },
    NonFiniteFrequency(u32),
    SelfDipole(u32),
    UnknownLevel { from: u32, to: u32 },
    NonFiniteDipole { from: u32, to: u32 },
    MissingPartner { from: u32, to: u32 },
    NotHermitian { from: u32, to: u32 },
    UnknownState { atom: char, state: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    BothGround,
    /// One atom excited; `excited` names it.
    OneExcited { excited: char },
    BothExcitedDissimilar,
    BothExcitedIdentical,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::BothGround => "both-ground",
            Scenario::OneExcited { .. } => "one-excited",
            Scenario::BothExcitedDissimilar => "both-excited-dissimilar",
            Scenario::BothExcitedIdentical => "both-excited-identical",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoAtomConfig {
    pub atom_a: AtomSpec,
    pub atom_b: AtomSpec,
    pub state_a: u32,
    pub state_b: u32,
    pub geometry: CavityGeometry,
}

/// A downward (resonant) channel: the excited atom decays `from -> to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResonantChannel {
    pub atom: char,
    pub from: u32,
    pub to: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub scenario: Option<Scenario>,
    pub resonant_channels: Vec<ResonantChannel>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<Scenario> {
        match (self.violations.first(), self.scenario) {
            (None, Some(s)) => Ok(s),
            _ => Err(Error::InvalidInput("invalid two-atom configuration")),
        }
    }
}

impl TwoAtomConfig {
    pub fn scenario(&self) -> Option<Scenario> {
        let ga = self.atom_a.ground()?;
        let gb = self.atom_b.ground()?;
        self.atom_a.level(self.state_a)?;
        self.atom_b.level(self.state_b)?;
        Some(match (self.state_a == ga, self.state_b == gb) {
            (true, true) => Scenario::BothGround,
            (false, true) => Scenario::OneExcited { excited: 'A' },
            (true, false) => Scenario::OneExcited { excited: 'B' },
            (false, false) if self.atom_a == self.atom_b && self.state_a == self.state_b => {
                Scenario::BothExcitedIdentical
            }
            (false, false) => Scenario::BothExcitedDissimilar,
        })
    }

    /// The same configuration with the roles of A and B exchanged.
    pub fn swapped(&self) -> TwoAtomConfig {
        TwoAtomConfig {
            atom_a: self.atom_b.clone(),
            atom_b: self.atom_a.clone(),
            state_a: self.state_b,
            state_b: self.state_a,
            geometry: self.geometry,
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = self.atom_a.violations();
        violations.extend(self.atom_b.violations());
        if self.atom_a.level(self.state_a).is_none() {
            violations.push(Violation::UnknownState { atom: 'A', state: self.state_a });
        }
        if self.atom_b.level(self.state_b).is_none() {
            violations.push(Violation::UnknownState { atom: 'B', state: self.state_b });
        }
        let scenario = self.scenario();
        let mut resonant_channels = Vec::new();
        for (name, atom, state) in [('A', &self.atom_a, self.state_a), ('B', &self.atom_b, self.state_b)] {
            for i in atom.coupled_to(state) {
                if i < state {
                    resonant_channels.push(ResonantChannel { atom: name, from: state, to: i });
                }
            }
        }
        ValidationReport { violations, scenario, resonant_channels }
    }

    pub(crate) fn ensure_valid(&self) -> Result<Scenario> {
        self.validate().into_result()
    }
}

/// Per-channel detuning ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetuningRatio {
    pub i: u32,
    pub j: u32,
    /// rad/s
    pub detuning: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    pub ratios: Vec<DetuningRatio>,
    pub max_ratio: f64,
    pub threshold: f64,
    pub flagged: bool,
}

/// Default flag level for `|W| / (hbar |detuning|)`.
pub const REGIME_THRESHOLD: f64 = 0.1;

/// Compares `|w_estimate|` (J) with `hbar |detuning|` for every channel whose
/// detuning enters a resonant denominator.
pub fn check_perturbative_regime(
    config: &TwoAtomConfig,
    w_estimate: f64,
    threshold: f64,
    constants: &PhysicalConstants,
) -> Result<RegimeReport> {
    let scenario = config.ensure_valid()?;
    let cfg = match scenario {
        Scenario::OneExcited { excited: 'B' } => config.swapped(),
        _ => config.clone(),
    };
    let (a_atom, b_atom, a, b) = (&cfg.atom_a, &cfg.atom_b, cfg.state_a, cfg.state_b);
    let mut pairs: Vec<(u32, u32, f64)> = Vec::new();
    let (wa, wb) = (a_atom.omega(a)?, b_atom.omega(b)?);
    match scenario {
        Scenario::BothGround => {}
        Scenario::OneExcited { .. } | Scenario::BothExcitedDissimilar => {
            for i in a_atom.coupled_to(a) {
                for j in b_atom.coupled_to(b) {
                    let w_ia = a_atom.omega(i)? - wa;
                    let w_jb = b_atom.omega(j)? - wb;
                    // Resonant denominators: i<a with j>b or j<b, and i>a with j<b.
                    if i < a || j < b {
                        pairs.push((i, j, w_ia.abs() - w_jb.abs()));
                    }
                }
            }
        }
        Scenario::BothExcitedIdentical => {
            for i in a_atom.coupled_to(a).into_iter().filter(|&i| i < a) {
                for j in a_atom.coupled_to(a).into_iter().filter(|&j| j != i) {
                    let w_ai = wa - a_atom.omega(i)?;
                    let w_ja = a_atom.omega(j)? - wa;
                    pairs.push((i, j, w_ai.abs() - w_ja.abs()));
                }
            }
        }
    }
    let mut ratios = Vec::new();
    let mut max_ratio: f64 = 0.0;
    for (i, j, det) in pairs {
        if det == 0.0 {
            return Err(Error::Degenerate { what: "zero detuning in a resonant channel" });
        }
        let ratio = w_estimate.abs() / (constants.hbar * det.abs());
        max_ratio = max_ratio.max(ratio);
        ratios.push(DetuningRatio { i, j, detuning: det, ratio });
    }
    Ok(RegimeReport { ratios, max_ratio, threshold, flagged: max_ratio > threshold })
}

/// Static polarisability `(2/hbar) sum_i |<state|d|i>|^2 / omega_{i,state}`
/// (C m^2/V).
pub fn static_polarisability(atom: &AtomSpec, state: u32, hbar: f64) -> Result<f64> {
    let w0 = atom.omega(state)?;
    let mut alpha = 0.0;
    for i in atom.coupled_to(state) {
        let w = atom.omega(i)? - w0;
        if w == 0.0 {
            return Err(Error::Degenerate { what: "zero transition frequency in polarisability" });
        }
        alpha += atom.dipole(state, i).norm_sqr() / w;
    }
    Ok(2.0 / hbar * alpha)
}
