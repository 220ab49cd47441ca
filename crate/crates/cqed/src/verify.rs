//! Built-in self-checks. `quick` runs a subset small enough for routine use;
//! `full` runs all of them.

use std::f64::consts::PI;
use std::time::Instant;

use cqed_core::atoms::{AtomSpec, Level, SphericalDipole, TwoAtomConfig};
use cqed_core::electrostatic::{v_static_dimensionless, v_static_free};
use cqed_core::green::{
    d_dk_k2_re_green, free_space_green, green_imaginary_freq, green_modesum, green_reflection_series,
    greens_q_integral_oracle, im_green_modesum, kramers_kronig_re, re_green_modesum, CavityGeometry, ModeSumOptions,
    ReflectionSigns, SeriesOptions, DERIVATIVE_TOL,
};
use cqed_core::quadrature::{QuadSpec, SeriesSpec};
use cqed_core::special::j0;
use cqed_core::vdw::{
    v_off_dimensionless, v_off_free, v_res_dimensionless, v_res_free, w_off_full, w_res_one_excited,
    w_res_two_excited_dissimilar, w_res_two_excited_identical, DerivativeRoute, VdwOptions,
};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum VerifyLevel {
    Quick,
    Full,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub level: &'static str,
    pub passed: bool,
    pub reflection_signs: &'static str,
    pub checks: Vec<Check>,
}

/// Largest relative deviation `|a - b| / max(|b|, floor)` over pairs.
fn worst(pairs: impl IntoIterator<Item = (f64, f64)>, floor: f64) -> f64 {
    pairs.into_iter().fold(0.0, |m, (a, b)| m.max((a - b).abs() / b.abs().max(floor)))
}

const STATIC_SERIES: SeriesSpec = SeriesSpec { rel_tol: 1e-14, n_max: 1_000_000, consecutive_small_terms: 3, abs_floor: 0.0 };

fn timed(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    let t = Instant::now();
    let (passed, detail) = match f() {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    Check { name, passed, detail, seconds: t.elapsed().as_secs_f64() }
}

pub fn run(level: VerifyLevel, signs: ReflectionSigns) -> Verdict {
    let full = level == VerifyLevel::Full;
    let mut checks = vec![timed("representation_equivalence", || representation_equivalence(full, signs))];
    if full {
        checks.push(timed("kramers_kronig", kramers_kronig));
    }
    checks.push(timed("sub_threshold", sub_threshold));
    if full {
        checks.push(timed("imaginary_frequency_oracle", imaginary_frequency_oracle));
        checks.push(timed("free_space_reduction", free_space_reduction));
    }
    checks.push(timed("resonant_algebra", resonant_algebra));
    if full {
        checks.push(timed("off_resonant_shape", off_resonant_shape));
        checks.push(timed("static_shape", static_shape));
    }
    checks.push(timed("static_free_limit", static_free_limit));
    if full {
        checks.push(timed("double_pole_derivative", double_pole_derivative));
        checks.push(timed("scenario_reductions", scenario_reductions));
    }
    Verdict {
        level: if full { "full" } else { "quick" },
        passed: checks.iter().all(|c| c.passed),
        reflection_signs: signs.describe(),
        checks,
    }
}

/// Mode sum against the reflection series, 1e-5 relative with a 1e-8 floor.
fn representation_equivalence(full: bool, signs: ReflectionSigns) -> Result<(bool, String)> {
    let (krs, kds): (&[f64], &[f64]) = if full { (&[0.2, 1.0, 2.0], &[2.0, 5.0, 20.0]) } else { (&[0.2, 1.0], &[2.0, 5.0]) };
    let opts = SeriesOptions { m_max: 500, quad: QuadSpec::default().with_rel_tol(1e-9), signs, ..SeriesOptions::default() };
    let mut dev = 0.0f64;
    for &kr in krs {
        for &kd in kds {
            let g = CavityGeometry::new(kr, kd)?;
            let ms = green_modesum(&g, 1.0, &ModeSumOptions::default())?;
            let s = green_reflection_series(&g, 1.0, &opts)?;
            for (a, b) in s.value.to_array().into_iter().zip(ms.to_array()) {
                dev = dev.max((a - b).norm() / (1e-5 * b.norm() + 1e-8));
            }
        }
    }
    Ok((dev <= 1.0, format!("{} points, worst deviation {dev:.3} of the allowed 1e-5 relative + 1e-8", krs.len() * kds.len())))
}

fn kramers_kronig() -> Result<(bool, String)> {
    let quad = QuadSpec { rel_tol: 1e-8, abs_tol: 1e-12, ..QuadSpec::default() };
    let points = [(1.0, 5.0), (0.5, 2.0), (2.0, 5.0), (1.0, 8.0), (2.0, 20.0)];
    let mut dev = 0.0f64;
    for (kr, kd) in points {
        let g = CavityGeometry::new(kr, kd)?;
        let want = re_green_modesum(&g, 1.0, &ModeSumOptions::default())?;
        let kk = kramers_kronig_re(&g, 1.0, &quad)?;
        dev = dev.max(worst(kk.to_array().into_iter().zip(want.to_array()), 0.0));
    }
    Ok((dev <= 1e-4, format!("5 points, worst relative deviation {dev:e}")))
}

/// Below `kd = pi` only the `n = 0` zz mode propagates.
fn sub_threshold() -> Result<(bool, String)> {
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    let mut dev = 0.0f64;
    let mut transverse = 0.0f64;
    for n in 1..=20 {
        let kr = 0.01 + 9.99 * (n as f64 * golden).fract();
        let kd = PI * (0.001 + 0.998 * (n as f64 * 2f64.sqrt()).fract());
        let im = im_green_modesum(&CavityGeometry::new(kr, kd)?, 1.0, &ModeSumOptions::default())?;
        transverse = transverse.max(im.par.abs()).max(im.perp.abs());
        let want = -j0(kr) / (4.0 * kd);
        dev = dev.max((im.zz - want).abs() / want.abs().max(1e-3));
    }
    Ok((transverse == 0.0 && dev <= 1e-12, format!("20 points, |Im par|, |Im perp| <= {transverse:e}, Im zz deviation {dev:e}")))
}

fn imaginary_frequency_oracle() -> Result<(bool, String)> {
    let quad = QuadSpec { rel_tol: 1e-11, abs_tol: 1e-300, ..QuadSpec::default() };
    let mut dev = 0.0f64;
    for ur in [0.5, 2.0] {
        for ud in [2.0, 10.0] {
            let g = CavityGeometry::new(ur, ud)?;
            let want = greens_q_integral_oracle(&g, 1.0, &quad)?;
            let got = green_imaginary_freq(&g, 1.0)?;
            dev = dev.max(worst(got.to_array().into_iter().zip(want.to_array()), 0.0));
        }
    }
    Ok((dev <= 1e-7, format!("4 points, worst relative deviation {dev:e}")))
}

/// Kd = 200 at Kr = 0.2; the static tensor at the same r/d.
fn free_space_reduction() -> Result<(bool, String)> {
    let (kr, kd) = (0.2, 200.0);
    let quad = QuadSpec { rel_tol: 1e-9, abs_tol: 1e-300, ..QuadSpec::default() };
    let g = CavityGeometry::new(kr, kd)?;
    let cav = green_modesum(&g, 1.0, &ModeSumOptions::default())?;
    let free = free_space_green(kr, 1.0)?;
    let dg = cav.to_array().iter().zip(free.to_array()).fold(0.0f64, |m, (a, b)| m.max((a - b).norm() / b.norm()));
    let off = worst(
        v_off_dimensionless(&g, 1.0, &quad)?.to_array().into_iter().zip(v_off_free(kr, &quad)?.to_array()),
        0.0,
    );
    let (ra, rb) = v_res_dimensionless(&g, 1.0, &ModeSumOptions::default())?;
    let (fa, fb) = v_res_free(kr)?;
    let res = worst(
        ra.to_array().into_iter().chain(rb.to_array()).zip(fa.to_array().into_iter().chain(fb.to_array())),
        0.0,
    );
    let sg = CavityGeometry::new(kr / kd, 1.0)?;
    let s = v_static_dimensionless(&sg, &STATIC_SERIES)?;
    let sf = v_static_free(&sg);
    let st = worst([(s.v00, sf.v00), (s.vpp, sf.vpp), (s.vpm, sf.vpm)], 0.0);
    let dev = dg.max(off).max(res).max(st);
    Ok((dev <= 0.01, format!("green {dg:e}, v_off {off:e}, v_res {res:e}, v_static {st:e}")))
}

/// `V_B - V_A = 2 Im^2 G` and `V_B >= |V_A|` on the Kd = 2 and Kd = 20 grids.
fn resonant_algebra() -> Result<(bool, String)> {
    let mut identity = 0.0f64;
    let mut envelope = true;
    let mut n = 0;
    for kd in [2.0, 20.0] {
        for i in 0..400 {
            let kr = 0.2 + (20.0 - 0.2) * i as f64 / 399.0;
            let g = CavityGeometry::new(kr, kd)?;
            let (va, vb) = v_res_dimensionless(&g, 1.0, &ModeSumOptions::default())?;
            let s = cqed_core::green::to_spherical(green_modesum(&g, 1.0, &ModeSumOptions::default())?);
            for ((a, b), z) in va.to_array().into_iter().zip(vb.to_array()).zip([s.pm, s.pp, s.zz]) {
                identity = identity.max(((b - a) - 2.0 * z.im * z.im).abs() / b.abs().max(f64::MIN_POSITIVE));
                envelope &= b >= a.abs();
            }
            n += 1;
        }
    }
    Ok((identity <= 1e-12 && envelope, format!("{n} points, identity deviation {identity:e}, envelope holds: {envelope}")))
}

fn argmax(v: &[f64]) -> usize {
    (0..v.len()).fold(0, |b, i| if v[i] > v[b] { i } else { b })
}

fn monotone(v: &[f64], increasing: bool) -> bool {
    v.windows(2).all(|w| if increasing { w[1] >= w[0] } else { w[1] <= w[0] })
}

/// Kr = 0.2, Kd log-spaced over [0.02, 20].
fn off_resonant_shape() -> Result<(bool, String)> {
    let kr = 0.2;
    let quad = QuadSpec { rel_tol: 1e-9, abs_tol: 1e-300, ..QuadSpec::default() };
    let kds: Vec<f64> = (0..200).map(|i| 0.02 * 1000f64.powf(i as f64 / 199.0)).collect();
    let mut cols = [Vec::new(), Vec::new(), Vec::new()];
    for &kd in &kds {
        let v = v_off_dimensionless(&CavityGeometry::new(kr, kd)?, 1.0, &quad)?;
        for (c, x) in cols.iter_mut().zip(v.to_array()) {
            c.push(x);
        }
    }
    let [pm, pp, zz] = &cols;
    let pp_ok = monotone(pp, true) && pp[0] < 1e-6 * pp[pp.len() - 1];
    let m = argmax(pm);
    let pm_ok = m > 0 && m < kds.len() - 1 && monotone(&pm[..=m], true) && monotone(&pm[m..], false);
    let neg: Vec<f64> = zz.iter().map(|x| -x).collect();
    let z = argmax(&neg);
    let zz_ok = z > 0 && z < kds.len() - 1 && monotone(&zz[..=z], false) && monotone(&zz[z..], true);
    let near = |kd: f64| kd > kr / 2.0 && kd < 2.0 * kr;
    let ok = pp_ok && pm_ok && zz_ok && near(kds[m]) && near(kds[z]);
    Ok((ok, format!("++ rises to the free value from {:e}; +- peaks at Kd = {:.3}; 00 dips at Kd = {:.3}", pp[0], kds[m], kds[z])))
}

/// Ratios to free space, r/d log-spaced over [0.01, 10].
fn static_shape() -> Result<(bool, String)> {
    let xs: Vec<f64> = (0..200).map(|i| 0.01 * 1000f64.powf(i as f64 / 199.0)).collect();
    let mut ratios = [Vec::new(), Vec::new(), Vec::new()];
    for &x in &xs {
        let g = CavityGeometry::new(x, 1.0)?;
        let (v, f) = (v_static_dimensionless(&g, &STATIC_SERIES)?, v_static_free(&g));
        for (r, (a, b)) in ratios.iter_mut().zip([(v.v00, f.v00), (v.vpp, f.vpp), (v.vpm, f.vpm)]) {
            r.push(a / b);
        }
    }
    let [r00, rpp, rpm] = &ratios;
    let m = argmax(rpm);
    let single = monotone(&rpm[..=m], true) && monotone(&rpm[m..], false);
    let ok = monotone(r00, false)
        && monotone(rpp, false)
        && single
        && rpm[m] > 1.0
        && xs[m] > 0.5
        && xs[m] < 2.0
        && ratios.iter().all(|r| r[r.len() - 1].abs() < 1e-6);
    Ok((ok, format!("+- ratio peaks at {:.4} at r/d = {:.3}; ratios at r/d = 10: {:e} {:e} {:e}", rpm[m], xs[m], r00[199], rpp[199], rpm[199])))
}

fn static_free_limit() -> Result<(bool, String)> {
    let g = CavityGeometry::new(0.01, 1.0)?;
    let (v, f) = (v_static_dimensionless(&g, &STATIC_SERIES)?, v_static_free(&g));
    let dev = worst([(v.v00, f.v00), (v.vpp, f.vpp), (v.vpm, f.vpm)], 0.0);
    Ok((dev <= 0.01, format!("r/d = 0.01, worst relative deviation {dev:e}")))
}

const W_RB: f64 = 2.0 * PI * 384.23e12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn three_level(label: &str, scale: f64) -> AtomSpec {
    let levels = vec![
        Level { index: 0, omega: 0.0 },
        Level { index: 1, omega: scale * W_RB },
        Level { index: 2, omega: 1.61 * scale * W_RB },
    ];
    AtomSpec::new(label, levels)
        .with_transition(0, 1, SphericalDipole::from_cartesian(c(2.1e-29, 0.0), c(0.0, 0.6e-29), c(1.2e-29, 0.0)))
        .with_transition(1, 2, SphericalDipole::from_cartesian(c(0.7e-29, 0.2e-29), c(1.1e-29, 0.0), c(0.0, -0.9e-29)))
}

fn double_pole_derivative() -> Result<(bool, String)> {
    let points = [(1.0, 5.0), (2.0, 20.0), (0.2, 2.0), (0.5, 7.5), (1.5, 3.7), (3.0, 11.0), (0.1, 0.8), (0.7, 14.2), (2.5, 4.4), (1.2, 9.0)];
    let mut dev = 0.0f64;
    for (kr, kd) in points {
        dev = dev.max(d_dk_k2_re_green(&CavityGeometry::new(kr, kd)?, 1.0, &ModeSumOptions::default())?.rel_diff);
    }
    let a = AtomSpec::new("A", vec![Level { index: 0, omega: 0.0 }, Level { index: 1, omega: W_RB }])
        .with_transition(0, 1, SphericalDipole::from_cartesian(c(1.5e-29, 0.0), c(0.0, 0.4e-29), c(0.8e-29, 0.0)));
    let cfg = TwoAtomConfig { atom_a: a.clone(), atom_b: a, state_a: 1, state_b: 1, geometry: CavityGeometry::new(0.45e-6, 1.3e-6)? };
    let analytic = w_res_two_excited_identical(&cfg, &VdwOptions::default())?;
    let fd = w_res_two_excited_identical(&cfg, &VdwOptions { derivative: DerivativeRoute::FiniteDifference, ..VdwOptions::default() })?;
    let pot = worst([(fd.w_a, analytic.w_a), (fd.phase_shift, analytic.phase_shift)], 0.0);
    let ok = dev < DERIVATIVE_TOL && pot < 1e-6;
    Ok((ok, format!("10 points, worst derivative deviation {dev:e}; identical-atom potential routes differ by {pot:e}")))
}

fn scenario_reductions() -> Result<(bool, String)> {
    let (a, b) = (three_level("A", 1.0), three_level("B", 0.915));
    let opts = VdwOptions::default();
    let geometry = CavityGeometry::new(0.45e-6, 1.3e-6)?;
    let cfg = TwoAtomConfig { atom_a: a.clone(), atom_b: b.clone(), state_a: 2, state_b: 0, geometry };
    let one = w_res_one_excited(&cfg, &opts)?;
    let two = w_res_two_excited_dissimilar(&cfg, &opts)?;
    let mut dev = if one.breakdown.len() == two.breakdown.len() { 0.0f64 } else { f64::INFINITY };
    for (x, y) in one.breakdown.iter().zip(&two.breakdown) {
        if (x.i, x.j, x.k) != (y.i, y.j, y.k) {
            dev = f64::INFINITY;
        }
        dev = dev.max(worst([(y.w_a, x.w_a), (y.w_b, x.w_b), (y.phase_shift, x.phase_shift)], f64::MIN_POSITIVE));
    }
    let mut equal = true;
    for (sa, sb) in [(0, 0), (1, 0), (0, 2), (1, 1), (2, 1)] {
        let w = w_off_full(&TwoAtomConfig { state_a: sa, state_b: sb, ..cfg.clone() }, &opts)?;
        equal &= w.w_a == w.w_b && w.w_b == w.phase_shift;
    }
    Ok((dev < 1e-13 && equal, format!("term-by-term deviation {dev:e}; off-resonant w_a = w_b = phase shift: {equal}")))
}
