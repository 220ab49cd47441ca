//! Cavity Green tensor as a sum over guided modes.
//!
//! With `a_n = n pi/d` and `kappa_n = sqrt(k^2 - a_n^2)`, odd `n` feed `par`
//! and `perp`; `zz` uses the even modes `b_n = 2 n pi/d` plus an
//! `n`-independent term. Propagating modes (`a_n < k`) give Bessel J in the
//! imaginary part and Bessel Y in the real part; evanescent modes give a
//! convergent Bessel-K tail in the real part.

use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::{check_positive, free_space_unchecked, CartesianGreen, CavityGeometry, ThresholdGuard};
use crate::error::{Error, Result};
use crate::quadrature::{sum_from, SeriesSpec, Vector};
use crate::special::{jy01, k01};

/// Relative agreement required between the two derivative routes.
pub const DERIVATIVE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSumOptions {
    pub guard: ThresholdGuard,
    /// Truncation of the Bessel-K tails.
    pub series: SeriesSpec,
}

impl Default for ModeSumOptions {
    fn default() -> Self {
        ModeSumOptions {
            guard: ThresholdGuard::default(),
            series: SeriesSpec { rel_tol: 1e-15, ..SeriesSpec::default() },
        }
    }
}

fn prepare(geom: &CavityGeometry, k: f64, opts: &ModeSumOptions) -> Result<(u64, u64)> {
    check_positive(k, "k must be positive and finite")?;
    opts.guard.check(k, geom.d())?;
    let x = k * geom.d() / PI;
    Ok((x.floor() as u64, (0.5 * x).floor() as u64))
}

/// Imaginary parts. `par`/`perp` are empty below `kd = pi`; `zz` always
/// carries `-J0(kr)/(4d)`.
pub fn im_green_modesum(geom: &CavityGeometry, k: f64, opts: &ModeSumOptions) -> Result<CartesianGreen<f64>> {
    let (n_odd, n_even) = prepare(geom, k, opts)?;
    let (r, d) = (geom.r(), geom.d());
    let k2 = k * k;
    let mut par = 0.0;
    let mut perp = 0.0;
    let mut n = 1;
    while n <= n_odd {
        let a = n as f64 * PI / d;
        let kap = (k2 - a * a).sqrt();
        let (j0, j1, _, _) = jy01(r * kap);
        let w = -2.0 / (4.0 * d * k2);
        par += w * (a * a * j0 + kap * j1 / r);
        perp += w * (k2 * j0 - kap * j1 / r);
        n += 2;
    }
    let mut zz = -jy01(k * r).0 / (4.0 * d);
    for m in 1..=n_even {
        let b = 2.0 * m as f64 * PI / d;
        let kap2 = k2 - b * b;
        zz -= kap2 * jy01(r * kap2.sqrt()).0 / (2.0 * k2 * d);
    }
    Ok(CartesianGreen { par, perp, zz })
}

/// Real parts: Bessel-Y sums over propagating modes plus Bessel-K tails.
pub fn re_green_modesum(geom: &CavityGeometry, k: f64, opts: &ModeSumOptions) -> Result<CartesianGreen<f64>> {
    let (n_odd, n_even) = prepare(geom, k, opts)?;
    let (r, d) = (geom.r(), geom.d());
    let k2 = k * k;
    let w_prop = -2.0 / (4.0 * d * k2);
    let w_ev = -2.0 / (2.0 * PI * d * k2);

    let mut par = 0.0;
    let mut perp = 0.0;
    let mut n = 1;
    while n <= n_odd {
        let a = n as f64 * PI / d;
        let kap = (k2 - a * a).sqrt();
        let (_, _, y0, y1) = jy01(r * kap);
        par -= w_prop * (a * a * y0 + kap * y1 / r);
        perp -= w_prop * (k2 * y0 - kap * y1 / r);
        n += 2;
    }
    let first_odd = if n_odd % 2 == 0 { n_odd + 1 } else { n_odd + 2 };
    let tail = sum_from(
        0,
        |j| {
            let a = (first_odd + 2 * j) as f64 * PI / d;
            let s = (a * a - k2).sqrt();
            let (k0, k1) = k01(r * s);
            Vector([w_ev * (a * a * k0 + s * k1 / r), w_ev * (k2 * k0 - s * k1 / r)])
        },
        &opts.series,
    )?;
    par += tail.value.0[0];
    perp += tail.value.0[1];

    let mut zz = jy01(k * r).2 / (4.0 * d);
    for m in 1..=n_even {
        let b = 2.0 * m as f64 * PI / d;
        let kap2 = k2 - b * b;
        zz += kap2 * jy01(r * kap2.sqrt()).2 / (2.0 * k2 * d);
    }
    let tail = sum_from(
        n_even + 1,
        |m| {
            let b = 2.0 * m as f64 * PI / d;
            let kap2 = k2 - b * b;
            -kap2 * k01(r * (-kap2).sqrt()).0 / (PI * k2 * d)
        },
        &opts.series,
    )?;
    zz += tail.value;
    Ok(CartesianGreen { par, perp, zz })
}

/// Real and imaginary parts together.
pub fn green_modesum(geom: &CavityGeometry, k: f64, opts: &ModeSumOptions) -> Result<CartesianGreen<Complex64>> {
    let re = re_green_modesum(geom, k, opts)?;
    let im = im_green_modesum(geom, k, opts)?;
    Ok(CartesianGreen::from_parts(re, im))
}

/// `d/dk [k^2 Re G]` from both routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeCheck {
    /// Term-by-term differentiation of the mode sums (the returned value).
    pub analytic: CartesianGreen<f64>,
    /// Central differences with two Richardson steps.
    pub finite_difference: CartesianGreen<f64>,
    /// Largest componentwise relative difference.
    pub rel_diff: f64,
}

/// `d/dk [k^2 Re G(r, d; k)]`, analytic with a finite-difference cross-check.
///
/// Fails with [`Error::DerivativeMismatch`] when the routes disagree by more
/// than [`DERIVATIVE_TOL`].
pub fn d_dk_k2_re_green(geom: &CavityGeometry, k: f64, opts: &ModeSumOptions) -> Result<DerivativeCheck> {
    let analytic = d_dk_analytic(geom, k, opts)?;
    let finite_difference = d_dk_finite_difference(geom, k, opts)?;
    compare(analytic, finite_difference)
}

/// Free-space counterpart of [`d_dk_k2_re_green`]:
/// `par = -2k cos(kr)/(4 pi r)`, `perp = zz = -(k cos(kr)/r - k^2 sin(kr))/(4 pi)`.
pub fn d_dk_k2_re_free(r: f64, k: f64) -> Result<DerivativeCheck> {
    check_positive(r, "r must be positive and finite")?;
    check_positive(k, "k must be positive and finite")?;
    let (s, c) = (k * r).sin_cos();
    let perp = -(k * c / r - k * k * s) / (4.0 * PI);
    let analytic = CartesianGreen { par: -2.0 * k * c / (4.0 * PI * r), perp, zz: perp };
    let f = |kk: f64| Ok(free_space_unchecked(r, kk).re() * (kk * kk));
    let finite_difference = richardson(f, k, 0.05 * k.min(1.0 / r))?;
    compare(analytic, finite_difference)
}

fn compare(analytic: CartesianGreen<f64>, finite_difference: CartesianGreen<f64>) -> Result<DerivativeCheck> {
    let scale = analytic.par.abs().max(analytic.perp.abs()).max(analytic.zz.abs());
    let mut rel_diff: f64 = 0.0;
    let mut worst = (0.0, 0.0);
    for (a, b) in analytic.to_array().into_iter().zip(finite_difference.to_array()) {
        let rel = (a - b).abs() / a.abs().max(1e-9 * scale);
        if rel > rel_diff {
            rel_diff = rel;
            worst = (a, b);
        }
    }
    if !(rel_diff <= DERIVATIVE_TOL) {
        return Err(Error::DerivativeMismatch { analytic: worst.0, numeric: worst.1, rel: rel_diff });
    }
    Ok(DerivativeCheck { analytic, finite_difference, rel_diff })
}

/// Central differences at `h`, `h/2`, `h/4` with two Richardson levels.
fn richardson<F>(f: F, k: f64, h: f64) -> Result<CartesianGreen<f64>>
where
    F: Fn(f64) -> Result<CartesianGreen<f64>>,
{
    if !(h > 0.0) {
        return Err(Error::InvalidInput("no room for a finite-difference stencil"));
    }
    let central = |h: f64| -> Result<CartesianGreen<f64>> { Ok((f(k + h)? - f(k - h)?) * (0.5 / h)) };
    let d1 = central(h)?;
    let d2 = central(0.5 * h)?;
    let d3 = central(0.25 * h)?;
    let r1 = (d2 * 4.0 - d1) * (1.0 / 3.0);
    let r2 = (d3 * 4.0 - d2) * (1.0 / 3.0);
    Ok((r2 * 16.0 - r1) * (1.0 / 15.0))
}

fn d_dk_analytic(geom: &CavityGeometry, k: f64, opts: &ModeSumOptions) -> Result<CartesianGreen<f64>> {
    let (n_odd, n_even) = prepare(geom, k, opts)?;
    let (r, d) = (geom.r(), geom.d());
    let k2 = k * k;
    // k^2 Re G_par = -sum f/(4d) [a^2 Y0 + kap Y1/r] + sum f/(2 pi d) [a^2 K0 + s K1/r], f = -2
    let w_prop = -2.0 / (4.0 * d);
    let w_ev = -2.0 / (2.0 * PI * d);
    let mut par = 0.0;
    let mut perp = 0.0;
    let mut n = 1;
    while n <= n_odd {
        let a = n as f64 * PI / d;
        let kap = (k2 - a * a).sqrt();
        let (_, _, y0, y1) = jy01(r * kap);
        par -= w_prop * (k * y0 - a * a * r * k * y1 / kap);
        perp -= w_prop * (k * y0 - r * k2 * k * y1 / kap);
        n += 2;
    }
    let first_odd = if n_odd % 2 == 0 { n_odd + 1 } else { n_odd + 2 };
    let tail = sum_from(
        0,
        |j| {
            let a = (first_odd + 2 * j) as f64 * PI / d;
            let s = (a * a - k2).sqrt();
            let (k0, k1) = k01(r * s);
            Vector([w_ev * (k * k0 + a * a * r * k * k1 / s), w_ev * (k * k0 + r * k2 * k * k1 / s)])
        },
        &opts.series,
    )?;
    par += tail.value.0[0];
    perp += tail.value.0[1];

    // k^2 Re G_zz = k^2 Y0(kr)/(4d) + sum kap^2 Y0/(2d) - sum (k^2 - b^2) K0/(pi d)
    let (_, _, y0, y1) = jy01(k * r);
    let mut zz = (2.0 * k * y0 - k2 * r * y1) / (4.0 * d);
    for m in 1..=n_even {
        let b = 2.0 * m as f64 * PI / d;
        let kap = (k2 - b * b).sqrt();
        let (_, _, y0, y1) = jy01(r * kap);
        zz += (2.0 * k * y0 - r * k * kap * y1) / (2.0 * d);
    }
    let tail = sum_from(
        n_even + 1,
        |m| {
            let b = 2.0 * m as f64 * PI / d;
            let s = (b * b - k2).sqrt();
            let (k0, k1) = k01(r * s);
            -(2.0 * k * k0 - r * k * s * k1) / (PI * d)
        },
        &opts.series,
    )?;
    zz += tail.value;
    Ok(CartesianGreen { par, perp, zz })
}

fn d_dk_finite_difference(geom: &CavityGeometry, k: f64, opts: &ModeSumOptions) -> Result<CartesianGreen<f64>> {
    let tight = ModeSumOptions { series: SeriesSpec { rel_tol: 1e-16, ..opts.series }, ..*opts };
    let dist = ThresholdGuard::distance(k, geom.d());
    let h = 0.05 * k.min(dist).min(1.0 / geom.r());
    richardson(|kk| Ok(re_green_modesum(geom, kk, &tight)? * (kk * kk)), k, h)
}
