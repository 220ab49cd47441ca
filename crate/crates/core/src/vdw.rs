//! van der Waals potentials and two-atom phase shifts.
//!
//! Dimensionless potentials take `K` as the unit: `V(Kr, Kd)`. Dimensional
//! energies are in joules; internally the Green tensor is evaluated with
//! lengths in units of `r`, using `G(r, d; k) = G(1, d/r; kr) / r`.
//!
//! Off-resonant part (all scenarios, `w_a = w_b = phase_shift`):
//!
//! ```text
//! W_off = -2/(pi hbar eps0^2 c^3) sum_ij int_0^inf du u^4 w_ia w_jb / ((u^2 + k_ia^2)(u^2 + k_jb^2))
//!         (d_ai.G(iu).d_jb)(d_bj.G(iu).d_ia)
//! ```
//!
//! Resonant parts are channel sums of Green products at the real resonant
//! wavenumbers; `w_a` and `w_b` differ by the sign of the `Im G Im G` term.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cell::Cell;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::atoms::{AtomSpec, PhysicalConstants, Scenario, SphericalDipole, TwoAtomConfig};
use crate::error::{Error, Result};
use crate::green::{
    d_dk_k2_re_free, d_dk_k2_re_green, free_space_green, free_space_green_imag, green_imaginary_freq_with,
    green_modesum, to_spherical, CartesianGreen, CavityGeometry, ImagFreqMethod, ModeSumOptions, SphericalGreen,
};
use crate::quadrature::{integrate_damped_oscillatory, integrate_panels, QuadSpec, QuadValue, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialFamily {
    Off,
    ResA,
    ResB,
    Static,
}

/// Dimensionless tensor potential in the spherical basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialTensor {
    pub vpm: f64,
    pub vpp: f64,
    pub v00: f64,
    pub family: PotentialFamily,
}

impl PotentialTensor {
    pub fn to_array(&self) -> [f64; 3] {
        [self.vpm, self.vpp, self.v00]
    }
}

/// Which Green tensor the dimensional potentials use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GreenModel {
    #[default]
    Cavity,
    FreeSpace,
}

/// Route for `d/dk [k^2 Re G]` in the identical-atom double-pole term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DerivativeRoute {
    #[default]
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VdwOptions {
    pub constants: PhysicalConstants,
    /// Imaginary-axis integrals.
    pub quad: QuadSpec,
    pub imag_method: ImagFreqMethod,
    pub modesum: ModeSumOptions,
    pub model: GreenModel,
    pub derivative: DerivativeRoute,
}

impl Default for VdwOptions {
    fn default() -> Self {
        VdwOptions {
            constants: PhysicalConstants::CODATA2018,
            quad: QuadSpec { rel_tol: 1e-9, abs_tol: 1e-300, ..QuadSpec::default() },
            imag_method: ImagFreqMethod::Auto,
            modesum: ModeSumOptions::default(),
            model: GreenModel::Cavity,
            derivative: DerivativeRoute::Analytic,
        }
    }
}

/// Magnitudes `|C_ij|` of the order-unity channel factors of the factorized
/// potentials; missing entries are 1. Signs follow fixed rules.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChannelFactors {
    pub magnitude: BTreeMap<(u32, u32), f64>,
}

impl ChannelFactors {
    pub fn get(&self, i: u32, j: u32) -> f64 {
        self.magnitude.get(&(i, j)).copied().unwrap_or(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelContribution {
    pub family: &'static str,
    /// Intermediate level of atom A.
    pub i: u32,
    /// Intermediate level of atom B.
    pub j: u32,
    /// Wavenumber at which the Green tensor was evaluated (1/m); 0 for
    /// imaginary-axis integrals.
    pub k: f64,
    pub w_a: f64,
    pub w_b: f64,
    pub phase_shift: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkippedChannel {
    pub family: &'static str,
    pub i: u32,
    pub j: u32,
    pub k: f64,
    pub error: Error,
}

/// Energies in joules. Totals are the sums of `breakdown` in order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EnergyResult {
    pub w_a: f64,
    pub w_b: f64,
    pub phase_shift: f64,
    pub breakdown: Vec<ChannelContribution>,
    pub skipped: Vec<SkippedChannel>,
}

impl EnergyResult {
    /// Phase-shift rate in rad/s.
    pub fn phase_shift_rate(&self, hbar: f64) -> f64 {
        self.phase_shift / hbar
    }

    pub(crate) fn push(&mut self, c: ChannelContribution) {
        self.w_a += c.w_a;
        self.w_b += c.w_b;
        self.phase_shift += c.phase_shift;
        self.breakdown.push(c);
    }

    /// Exchange the roles of A and B.
    fn swapped(mut self) -> Self {
        core::mem::swap(&mut self.w_a, &mut self.w_b);
        for c in &mut self.breakdown {
            core::mem::swap(&mut c.w_a, &mut c.w_b);
            core::mem::swap(&mut c.i, &mut c.j);
        }
        for s in &mut self.skipped {
            core::mem::swap(&mut s.i, &mut s.j);
        }
        self
    }
}

// ---------------------------------------------------------------------------
// Dimensionless potentials

/// `int_0^inf f` for an integrand peaked near `q ~ peak` and decaying at
/// least like `exp(-scale q)`.
fn integrate_half_line<T: QuadValue, F: FnMut(f64) -> T>(mut f: F, peak: f64, scale: f64, quad: &QuadSpec) -> Result<T> {
    let decay = 1.0 / scale;
    let end = (4.0 * peak).max(decay);
    let mut breaks = alloc::vec![0.0];
    let mut x = (peak / 64.0).min(end / 2.0);
    while x < end {
        breaks.push(x);
        x *= 2.0;
    }
    breaks.push(end);
    let head = integrate_panels(&mut f, &breaks, quad)?;
    let tail = integrate_damped_oscillatory(&mut f, end, scale, f64::INFINITY, quad)?;
    Ok(head.value + tail.value)
}

/// Tolerance for Green evaluations inside an outer integral at `quad`; the
/// inner noise has to sit well below the outer tolerance.
fn inner_quad(quad: &QuadSpec) -> QuadSpec {
    QuadSpec { rel_tol: (1e-2 * quad.rel_tol).max(1e-13), ..*quad }
}

fn v_off_from<G>(green: G, kr: f64, quad: &QuadSpec) -> Result<PotentialTensor>
where
    G: Fn(f64) -> Result<CartesianGreen<f64>>,
{
    let failure: Cell<Option<Error>> = Cell::new(None);
    let integrand = |q: f64| {
        match green(q) {
            Ok(g) => {
                let s = to_spherical(g);
                let w = q.powi(4) / (q * q + 1.0).powi(2);
                Vector([w * s.pm * s.pm, w * s.pp * s.pp, w * s.zz * s.zz])
            }
            Err(e) => {
                if failure.get().is_none() {
                    failure.set(Some(e));
                }
                Vector([0.0; 3])
            }
        }
    };
    let v = integrate_half_line(integrand, 1.0, 2.0 * kr, quad)?;
    if let Some(e) = failure.get() {
        return Err(e);
    }
    Ok(PotentialTensor { vpm: v.0[0], vpp: v.0[1], v00: v.0[2], family: PotentialFamily::Off })
}

/// `V_off^pq = int_0^inf dq q^4 G_pq(Kr, Kd; iq)^2 / (q^2 + 1)^2`.
///
/// The integrand is finite at `q = 0`: `G(iq) ~ 1/q^2` cancels the `q^4`.
pub fn v_off_dimensionless(geom: &CavityGeometry, k_ref: f64, quad: &QuadSpec) -> Result<PotentialTensor> {
    let g = geom.scaled(1.0 / k_ref);
    let inner = inner_quad(quad);
    v_off_from(|q| green_imaginary_freq_with(&g, q, ImagFreqMethod::Auto, &inner), g.r(), quad)
}

/// [`v_off_dimensionless`] with the free-space tensor.
pub fn v_off_free(kr: f64, quad: &QuadSpec) -> Result<PotentialTensor> {
    v_off_from(|q| free_space_green_imag(kr, q), kr, quad)
}

fn v_res_from(g: CartesianGreen<Complex64>) -> (PotentialTensor, PotentialTensor) {
    let s = to_spherical(g);
    let a = |z: Complex64| z.re * z.re - z.im * z.im;
    let b = |z: Complex64| z.re * z.re + z.im * z.im;
    (
        PotentialTensor { vpm: a(s.pm), vpp: a(s.pp), v00: a(s.zz), family: PotentialFamily::ResA },
        PotentialTensor { vpm: b(s.pm), vpp: b(s.pp), v00: b(s.zz), family: PotentialFamily::ResB },
    )
}

/// `V_A = Re^2 G - Im^2 G`, `V_B = Re^2 G + Im^2 G` at `k = K`, in units of `K`.
pub fn v_res_dimensionless(
    geom: &CavityGeometry,
    k_ref: f64,
    opts: &ModeSumOptions,
) -> Result<(PotentialTensor, PotentialTensor)> {
    Ok(v_res_from(green_modesum(&geom.scaled(1.0 / k_ref), 1.0, opts)?))
}

/// [`v_res_dimensionless`] with the free-space tensor.
pub fn v_res_free(kr: f64) -> Result<(PotentialTensor, PotentialTensor)> {
    Ok(v_res_from(free_space_green(kr, 1.0)?))
}

// ---------------------------------------------------------------------------
// Dimensional potentials

fn omega_diff(atom: &AtomSpec, upper: u32, lower: u32) -> Result<f64> {
    Ok(atom.omega(upper)? - atom.omega(lower)?)
}

/// Off-resonant potential by direct integration over the imaginary axis.
pub fn w_off_full(config: &TwoAtomConfig, opts: &VdwOptions) -> Result<EnergyResult> {
    config_check(config)?;
    let k = &opts.constants;
    let (a_atom, b_atom, a, b) = (&config.atom_a, &config.atom_b, config.state_a, config.state_b);
    let len = config.geometry.r();
    let unit = config.geometry.scaled(len);
    let mut out = EnergyResult::default();
    for i in a_atom.coupled_to(a) {
        for j in b_atom.coupled_to(b) {
            let w_ia = omega_diff(a_atom, i, a)?;
            let w_jb = omega_diff(b_atom, j, b)?;
            if w_ia == 0.0 || w_jb == 0.0 {
                return Err(Error::Degenerate { what: "zero transition frequency" });
            }
            let (k1, k2) = (w_ia / k.c * len, w_jb / k.c * len);
            let (d_ai, d_jb) = (a_atom.dipole(a, i), b_atom.dipole(j, b));
            let (d_bj, d_ia) = (b_atom.dipole(b, j), a_atom.dipole(i, a));
            let failure: Cell<Option<Error>> = Cell::new(None);
            let inner = inner_quad(&opts.quad);
            let integrand = |x: f64| {
                let g = match opts.model {
                    GreenModel::Cavity => green_imaginary_freq_with(&unit, x, opts.imag_method, &inner),
                    GreenModel::FreeSpace => free_space_green_imag(1.0, x),
                };
                match g {
                    Ok(g) => {
                        let s = to_spherical(g);
                        let p = d_ai.contract(&s, &d_jb) * d_bj.contract(&s, &d_ia);
                        let x2 = x * x;
                        x2 * x2 * p.re / ((x2 + k1 * k1) * (x2 + k2 * k2))
                    }
                    Err(e) => {
                        if failure.get().is_none() {
                            failure.set(Some(e));
                        }
                        0.0
                    }
                }
            };
            let peak = k1.abs().min(k2.abs()).min(1.0);
            let integral = integrate_half_line(integrand, peak, 2.0, &opts.quad)?;
            if let Some(e) = failure.get() {
                return Err(e);
            }
            let w = -2.0 * w_ia * w_jb / (PI * k.hbar * k.epsilon0 * k.epsilon0 * k.c.powi(3) * len.powi(3)) * integral;
            out.push(ChannelContribution { family: "off", i, j, k: 0.0, w_a: w, w_b: w, phase_shift: w });
        }
    }
    Ok(out)
}

fn config_check(config: &TwoAtomConfig) -> Result<Scenario> {
    config.validate().into_result()
}

fn dipole_weights(d_a: &SphericalDipole, d_b: &SphericalDipole) -> [f64; 3] {
    let p = |x: Complex64, y: Complex64| (x * y).norm_sqr();
    [
        p(d_a.plus, d_b.minus) + p(d_a.minus, d_b.plus),
        p(d_a.plus, d_b.plus) + p(d_a.minus, d_b.minus),
        p(d_a.zero, d_b.zero),
    ]
}

/// Factorized off-resonant potential with a common reference wavenumber `K`:
/// `-2 K^5/(pi hbar eps0^2 c) sum_ij C_ij [weights . V_off(Kr, Kd)]`,
/// `sgn C_ij = sgn(w_ia w_jb)`.
pub fn w_off_factorized(
    config: &TwoAtomConfig,
    k_ref: f64,
    factors: &ChannelFactors,
    opts: &VdwOptions,
) -> Result<EnergyResult> {
    config_check(config)?;
    let k = &opts.constants;
    let v = match opts.model {
        GreenModel::Cavity => v_off_dimensionless(&config.geometry, k_ref, &opts.quad)?,
        GreenModel::FreeSpace => v_off_free(k_ref * config.geometry.r(), &opts.quad)?,
    };
    let pref = -2.0 * k_ref.powi(5) / (PI * k.hbar * k.epsilon0 * k.epsilon0 * k.c);
    let (a_atom, b_atom, a, b) = (&config.atom_a, &config.atom_b, config.state_a, config.state_b);
    let mut out = EnergyResult::default();
    for i in a_atom.coupled_to(a) {
        for j in b_atom.coupled_to(b) {
            let w_ia = omega_diff(a_atom, i, a)?;
            let w_jb = omega_diff(b_atom, j, b)?;
            if w_ia == 0.0 || w_jb == 0.0 {
                return Err(Error::Degenerate { what: "zero transition frequency" });
            }
            let c = factors.get(i, j) * (w_ia * w_jb).signum();
            let wts = dipole_weights(&a_atom.dipole(i, a), &b_atom.dipole(b, j));
            let w = pref * c * (wts[0] * v.vpm + wts[1] * v.vpp + wts[2] * v.v00);
            out.push(ChannelContribution { family: "off", i, j, k: k_ref, w_a: w, w_b: w, phase_shift: w });
        }
    }
    Ok(out)
}

/// Green tensor (spherical) at real `k` for the configured model.
fn green_at(geom: &CavityGeometry, k: f64, opts: &VdwOptions) -> Result<SphericalGreen<Complex64>> {
    let r = geom.r();
    let g = match opts.model {
        GreenModel::Cavity => green_modesum(&geom.scaled(r), k * r, &opts.modesum)? * (1.0 / r),
        GreenModel::FreeSpace => free_space_green(r, k)?,
    };
    Ok(to_spherical(g))
}

/// `d/dk [k^2 Re G]` (spherical) for the configured model and route.
fn d_dk_at(geom: &CavityGeometry, k: f64, opts: &VdwOptions) -> Result<SphericalGreen<f64>> {
    let r = geom.r();
    let (check, scale) = match opts.model {
        GreenModel::Cavity => (d_dk_k2_re_green(&geom.scaled(r), k * r, &opts.modesum)?, 1.0 / (r * r)),
        GreenModel::FreeSpace => (d_dk_k2_re_free(r, k)?, 1.0),
    };
    let g = match opts.derivative {
        DerivativeRoute::Analytic => check.analytic,
        DerivativeRoute::FiniteDifference => check.finite_difference,
    };
    Ok(to_spherical(g * scale))
}

/// `Re[(d1.ReG.d2)(d3.ReG.d4)]` and the same with `Im G`.
fn re_im_products(
    g: &SphericalGreen<Complex64>,
    d1: &SphericalDipole,
    d2: &SphericalDipole,
    d3: &SphericalDipole,
    d4: &SphericalDipole,
) -> (f64, f64) {
    let re = g.map(|z| z.re);
    let im = g.map(|z| z.im);
    let rr = (d1.contract(&re, d2) * d3.contract(&re, d4)).re;
    let ii = (d1.contract(&im, d2) * d3.contract(&im, d4)).re;
    (rr, ii)
}

/// Evaluates the Green tensor for one channel; a threshold hit is recorded
/// as a skipped channel instead of failing the sum.
fn channel_green(
    out: &mut EnergyResult,
    family: &'static str,
    (i, j): (u32, u32),
    geom: &CavityGeometry,
    k: f64,
    opts: &VdwOptions,
) -> Result<Option<SphericalGreen<Complex64>>> {
    match green_at(geom, k, opts) {
        Ok(g) => Ok(Some(g)),
        Err(e @ Error::Threshold { .. }) => {
            out.skipped.push(SkippedChannel { family, i, j, k, error: e });
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn nonzero(den: f64) -> Result<f64> {
    if den == 0.0 {
        Err(Error::Degenerate { what: "vanishing resonant denominator" })
    } else {
        Ok(den)
    }
}

/// Resonant potentials with one atom excited and the other in its ground
/// state. If B is the excited atom the roles are exchanged.
pub fn w_res_one_excited(config: &TwoAtomConfig, opts: &VdwOptions) -> Result<EnergyResult> {
    match config_check(config)? {
        Scenario::OneExcited { excited: 'A' } => one_excited(config, opts),
        Scenario::OneExcited { .. } => Ok(one_excited(&config.swapped(), opts)?.swapped()),
        _ => Err(Error::InvalidInput("w_res_one_excited needs exactly one excited atom")),
    }
}

fn one_excited(config: &TwoAtomConfig, opts: &VdwOptions) -> Result<EnergyResult> {
    let k = &opts.constants;
    let (a_atom, b_atom, a, b) = (&config.atom_a, &config.atom_b, config.state_a, config.state_b);
    let geom = &config.geometry;
    let mut out = EnergyResult::default();
    for i in a_atom.coupled_to(a).into_iter().filter(|&i| i < a) {
        let w_ai = omega_diff(a_atom, a, i)?;
        let k_ai = w_ai / k.c;
        for j in b_atom.coupled_to(b) {
            let w_j0 = omega_diff(b_atom, j, b)?;
            let kernel = 2.0 * w_j0 * k_ai.powi(4) / (k.epsilon0 * k.epsilon0 * k.hbar * nonzero(w_ai * w_ai - w_j0 * w_j0)?);
            let Some(g) = channel_green(&mut out, "one-excited", (i, j), geom, k_ai, opts)? else { continue };
            let (rr, ii) =
                re_im_products(&g, &a_atom.dipole(a, i), &b_atom.dipole(b, j), &b_atom.dipole(j, b), &a_atom.dipole(i, a));
            let w_a = kernel * (rr - ii);
            let w_b = kernel * (rr + ii);
            out.push(ChannelContribution { family: "one-excited", i, j, k: k_ai, w_a, w_b, phase_shift: w_a });
        }
    }
    Ok(out)
}

/// Resonant potentials with both atoms excited in different configurations.
///
/// Four channel families: `(i<a, j>b)` at `k_ai`, `(i>a, j<b)` at `k_bj`, and
/// two `(i<a, j<b)` families at `k_ai` and `k_bj`. With B in its ground state
/// only the first survives.
pub fn w_res_two_excited_dissimilar(config: &TwoAtomConfig, opts: &VdwOptions) -> Result<EnergyResult> {
    config_check(config)?;
    let k = &opts.constants;
    let (a_atom, b_atom, a, b) = (&config.atom_a, &config.atom_b, config.state_a, config.state_b);
    let geom = &config.geometry;
    let eps2h = k.epsilon0 * k.epsilon0 * k.hbar;
    let mut out = EnergyResult::default();
    for i in a_atom.coupled_to(a) {
        for j in b_atom.coupled_to(b) {
            let (d_ai, d_ia) = (a_atom.dipole(a, i), a_atom.dipole(i, a));
            let (d_bj, d_jb) = (b_atom.dipole(b, j), b_atom.dipole(j, b));
            let w_ai = omega_diff(a_atom, a, i)?;
            let w_bj = omega_diff(b_atom, b, j)?;
            let (k_ai, k_bj) = (w_ai / k.c, w_bj / k.c);
            // (family, k, kernel, dipoles in printed order, Im Im signs for (w_a, w_b, phase))
            type Term = (&'static str, f64, f64, [SphericalDipole; 4], [f64; 3]);
            let mut terms: Vec<Term> = Vec::new();
            if i < a && j > b {
                let w_jb = -w_bj;
                let kernel = 2.0 * w_jb * k_ai.powi(4) / (eps2h * nonzero(w_ai * w_ai - w_jb * w_jb)?);
                terms.push(("i<a,j>b", k_ai, kernel, [d_ai, d_bj, d_jb, d_ia], [-1.0, 1.0, -1.0]));
            }
            if i > a && j < b {
                let w_ia = -w_ai;
                let kernel = 2.0 * w_ia * k_bj.powi(4) / (eps2h * nonzero(w_bj * w_bj - w_ia * w_ia)?);
                terms.push(("i>a,j<b", k_bj, kernel, [d_bj, d_ai, d_ia, d_jb], [1.0, -1.0, -1.0]));
            }
            if i < a && j < b {
                let den = nonzero(w_ai * w_ai - w_bj * w_bj)?;
                let k1 = -2.0 * w_bj * k_ai.powi(4) / (eps2h * den);
                let k2 = 2.0 * w_ai * k_bj.powi(4) / (eps2h * den);
                terms.push(("i<a,j<b@k_ai", k_ai, k1, [d_ai, d_jb, d_bj, d_ia], [-1.0, 1.0, -1.0]));
                terms.push(("i<a,j<b@k_bj", k_bj, k2, [d_bj, d_ai, d_ia, d_jb], [1.0, -1.0, -1.0]));
            }
            for (family, kk, kernel, d, s) in terms {
                let Some(g) = channel_green(&mut out, family, (i, j), geom, kk, opts)? else { continue };
                let (rr, ii) = re_im_products(&g, &d[0], &d[1], &d[2], &d[3]);
                out.push(ChannelContribution {
                    family,
                    i,
                    j,
                    k: kk,
                    w_a: kernel * (rr + s[0] * ii),
                    w_b: kernel * (rr + s[1] * ii),
                    phase_shift: kernel * (rr + s[2] * ii),
                });
            }
        }
    }
    Ok(out)
}

/// Resonant potential and phase shift for identical atoms in the same
/// excited state. Channels `i = j` carry the double-pole term with
/// `d/dk [k^2 Re G]`; by symmetry `w_b = w_a`.
pub fn w_res_two_excited_identical(config: &TwoAtomConfig, opts: &VdwOptions) -> Result<EnergyResult> {
    if config_check(config)? != Scenario::BothExcitedIdentical {
        return Err(Error::InvalidInput("w_res_two_excited_identical needs identical atoms in the same excited state"));
    }
    let k = &opts.constants;
    let (atom, a) = (&config.atom_a, config.state_a);
    let geom = &config.geometry;
    let eps2h = k.epsilon0 * k.epsilon0 * k.hbar;
    let mut out = EnergyResult::default();
    let coupled = atom.coupled_to(a);
    for &i in coupled.iter().filter(|&&i| i < a) {
        let w_ai = omega_diff(atom, a, i)?;
        let k_ai = w_ai / k.c;
        let (d_ai, d_ia) = (atom.dipole(a, i), atom.dipole(i, a));
        for &j in &coupled {
            if j == i {
                let Some(g) = channel_green(&mut out, "i=j", (i, j), geom, k_ai, opts)? else { continue };
                let dd = match d_dk_at(geom, k_ai, opts) {
                    Ok(dd) => dd,
                    Err(e @ Error::Threshold { .. }) => {
                        out.skipped.push(SkippedChannel { family: "i=j", i, j, k: k_ai, error: e });
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let (rr, ii) = re_im_products(&g, &d_ai, &d_ia, &d_ai, &d_ia);
                let re = g.map(|z| z.re);
                let rd = (d_ai.contract(&re, &d_ia) * d_ai.contract(&dd, &d_ia)).re;
                let kernel = k_ai * k_ai / (k.epsilon0 * k.epsilon0 * k.c * k.hbar);
                let w = kernel * (k_ai * rr - 2.0 * rd);
                let phase = kernel * (k_ai * rr - k_ai * ii - 2.0 * rd);
                out.push(ChannelContribution { family: "i=j", i, j, k: k_ai, w_a: w, w_b: w, phase_shift: phase });
            } else {
                let w_ja = omega_diff(atom, j, a)?;
                let kernel = 4.0 * w_ja * k_ai.powi(4) / (eps2h * nonzero(w_ai * w_ai - w_ja * w_ja)?);
                let Some(g) = channel_green(&mut out, "i!=j", (i, j), geom, k_ai, opts)? else { continue };
                let (rr, ii) = re_im_products(&g, &d_ai, &atom.dipole(j, a), &atom.dipole(a, j), &d_ia);
                let w = kernel * rr;
                out.push(ChannelContribution { family: "i!=j", i, j, k: k_ai, w_a: w, w_b: w, phase_shift: kernel * (rr - ii) });
            }
        }
    }
    Ok(out)
}

/// Factorized resonant potentials (one atom excited) with reference `K`:
/// `2 K^5/(pi hbar eps0^2 c) sum_ij C'_ij [weights . V_A,B(Kr, Kd)]`,
/// `sgn C'_ij = sgn(w_ai - w_j0)`.
pub fn w_res_factorized(
    config: &TwoAtomConfig,
    k_ref: f64,
    factors: &ChannelFactors,
    opts: &VdwOptions,
) -> Result<EnergyResult> {
    match config_check(config)? {
        Scenario::OneExcited { excited: 'A' } => {}
        Scenario::OneExcited { .. } => return Ok(w_res_factorized(&config.swapped(), k_ref, factors, opts)?.swapped()),
        _ => return Err(Error::InvalidInput("w_res_factorized needs exactly one excited atom")),
    }
    let k = &opts.constants;
    let (va, vb) = match opts.model {
        GreenModel::Cavity => v_res_dimensionless(&config.geometry, k_ref, &opts.modesum)?,
        GreenModel::FreeSpace => v_res_free(k_ref * config.geometry.r())?,
    };
    let pref = 2.0 * k_ref.powi(5) / (PI * k.hbar * k.epsilon0 * k.epsilon0 * k.c);
    let (a_atom, b_atom, a, b) = (&config.atom_a, &config.atom_b, config.state_a, config.state_b);
    let mut out = EnergyResult::default();
    for i in a_atom.coupled_to(a).into_iter().filter(|&i| i < a) {
        for j in b_atom.coupled_to(b) {
            let det = omega_diff(a_atom, a, i)? - omega_diff(b_atom, j, b)?;
            let c = factors.get(i, j) * nonzero(det)?.signum();
            let wts = dipole_weights(&a_atom.dipole(i, a), &b_atom.dipole(b, j));
            let dot = |v: &PotentialTensor| wts[0] * v.vpm + wts[1] * v.vpp + wts[2] * v.v00;
            let (w_a, w_b) = (pref * c * dot(&va), pref * c * dot(&vb));
            out.push(ChannelContribution { family: "one-excited", i, j, k: k_ref, w_a, w_b, phase_shift: w_a });
        }
    }
    Ok(out)
}
