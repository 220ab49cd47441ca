//! Green tensor at imaginary wavenumber `k = iu`, where it is real.
//!
//! Two routes:
//! * zeta integral: free-space part plus a scattering integral over
//!   `t in [ud, inf)` damped by `1/(e^t + 1)` (`par`, `perp`) or
//!   `1/(e^t - 1)` (`zz`). Cheap for `r << d`.
//! * evanescent mode sum: every mode is evanescent, so the sums are pure
//!   Bessel-K series converging like `exp(-n pi r/d)`. Cheap for `r >~ d`.

use core::f64::consts::PI;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::{check_positive, from_spherical, to_spherical, CartesianGreen, CavityGeometry, SphericalGreen};
use crate::error::Result;
use crate::quadrature::{integrate_damped_oscillatory, sum_from, QuadSpec, SeriesSpec, Vector};
use crate::special::{j0, j2, k01};

/// Below this `r/d` the automatic choice is the zeta integral; above it the
/// mode sum, unless the scattering part is negligible anyway.
const AUTO_SWITCH_R_OVER_D: f64 = 0.008;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ImagFreqMethod {
    #[default]
    Auto,
    ZetaIntegral,
    ModeSum,
}

/// Free-space tensor at `k = iu`:
/// `par = e^{-ur}/(4 pi u^2) (2/r^3 + 2u/r^2)`,
/// `perp = zz = -e^{-ur}/(4 pi u^2) (1/r^3 + u/r^2 + u^2/r)`.
pub fn free_space_green_imag(r: f64, u: f64) -> Result<CartesianGreen<f64>> {
    check_positive(r, "r must be positive and finite")?;
    check_positive(u, "u must be positive and finite")?;
    Ok(free_imag_unchecked(r, u))
}

fn free_imag_unchecked(r: f64, u: f64) -> CartesianGreen<f64> {
    let pref = (-u * r).exp() / (4.0 * PI * u * u);
    let r2 = r * r;
    let r3 = r2 * r;
    let par = pref * (2.0 / r3 + 2.0 * u / r2);
    let perp = -pref * (1.0 / r3 + u / r2 + u * u / r);
    CartesianGreen { par, perp, zz: perp }
}

/// `G(r, d; iu)` with the route picked from `r/d`.
pub fn green_imaginary_freq(geom: &CavityGeometry, u: f64) -> Result<CartesianGreen<f64>> {
    green_imaginary_freq_with(geom, u, ImagFreqMethod::Auto, &QuadSpec { rel_tol: 1e-11, abs_tol: 1e-300, ..QuadSpec::default() })
}

/// `G(r, d; iu)` by an explicit route. `quad` controls the zeta integral;
/// the mode sums run to `quad.rel_tol` as well.
pub fn green_imaginary_freq_with(
    geom: &CavityGeometry,
    u: f64,
    method: ImagFreqMethod,
    quad: &QuadSpec,
) -> Result<CartesianGreen<f64>> {
    check_positive(u, "u must be positive and finite")?;
    quad.validate()?;
    let use_modes = match method {
        ImagFreqMethod::Auto => {
            let free = free_imag_unchecked(geom.r(), u);
            geom.r() / geom.d() >= AUTO_SWITCH_R_OVER_D && !scattering_negligible(geom, u, &zeta_spec(&free, quad))
        }
        ImagFreqMethod::ZetaIntegral => false,
        ImagFreqMethod::ModeSum => true,
    };
    if use_modes {
        modesum(geom, u, quad.rel_tol)
    } else {
        zeta_integral(geom, u, quad)
    }
}

/// Tolerance for the scattering integral, relative to the free-space scale,
/// which dominates the cancellation at small u.
fn zeta_spec(free: &CartesianGreen<f64>, quad: &QuadSpec) -> QuadSpec {
    let scale = free.par.abs().max(free.perp.abs());
    QuadSpec { abs_tol: quad.abs_tol.max(1e-3 * quad.rel_tol * scale), ..*quad }
}

/// Bound on the scattering integrals from `|J| <= 1` and occupation factors
/// below `e^-t/(1 - e^-ud)`.
fn scattering_negligible(geom: &CavityGeometry, u: f64, spec: &QuadSpec) -> bool {
    let (d, ud) = (geom.d(), u * geom.d());
    let bound = (-ud).exp() * (2.0 + 2.0 / ud + 2.0 / (ud * ud)) / (2.0 * PI * d * -(-ud).exp_m1());
    bound <= spec.abs_tol
}

fn zeta_integral(geom: &CavityGeometry, u: f64, quad: &QuadSpec) -> Result<CartesianGreen<f64>> {
    let (r, d) = (geom.r(), geom.d());
    let ud = u * d;
    let integrand = |t: f64| {
        let ratio = t * t / (ud * ud);
        let x = r * (t * t / (d * d) - u * u).max(0.0).sqrt();
        let (b0, b2) = (j0(x), j2(x));
        let fermi = 1.0 / (t.exp() + 1.0);
        let bose = 1.0 / t.exp_m1();
        Vector([
            (1.0 + ratio) * b0 * fermi / (4.0 * PI * d),
            (1.0 - ratio) * b2 * fermi / (4.0 * PI * d),
            (ratio - 1.0) * b0 * bose / (2.0 * PI * d),
        ])
    };
    let free = free_imag_unchecked(r, u);
    let spec = zeta_spec(&free, quad);
    if scattering_negligible(geom, u, &spec) {
        return Ok(free);
    }
    let sc = integrate_damped_oscillatory(integrand, ud, 1.0, 2.0 * PI * d / r, &spec)?.value.0;
    let free_sph = to_spherical(free);
    Ok(from_spherical(SphericalGreen { pm: free_sph.pm + sc[0], pp: free_sph.pp + sc[1], zz: free_sph.zz + sc[2] }))
}

fn modesum(geom: &CavityGeometry, u: f64, rel_tol: f64) -> Result<CartesianGreen<f64>> {
    let (r, d) = (geom.r(), geom.d());
    let u2 = u * u;
    let spec = SeriesSpec { rel_tol: rel_tol.min(1e-13), ..SeriesSpec::default() };
    let w = 1.0 / (PI * d * u2);
    let odd = sum_from(
        0,
        |j| {
            let a = (2 * j + 1) as f64 * PI / d;
            let kap = (a * a + u2).sqrt();
            let (k0, k1) = k01(r * kap);
            Vector([w * (a * a * k0 + kap * k1 / r), -w * (u2 * k0 + kap * k1 / r)])
        },
        &spec,
    )?;
    let zz = sum_from(
        1,
        |n| {
            let b2 = (2.0 * n as f64 * PI / d).powi(2);
            (u2 + b2) * k01(r * (u2 + b2).sqrt()).0
        },
        &spec,
    )?;
    let zz = -w * (0.5 * u2 * k01(r * u).0 + zz.value);
    Ok(CartesianGreen { par: odd.value.0[0], perp: odd.value.0[1], zz })
}

/// Independent route: integral over the in-plane wavenumber `q`,
/// `kappa = sqrt(u^2 + q^2)`, plus the free-space part. Slow; for tests.
pub fn greens_q_integral_oracle(geom: &CavityGeometry, u: f64, quad: &QuadSpec) -> Result<CartesianGreen<f64>> {
    check_positive(u, "u must be positive and finite")?;
    let (r, d) = (geom.r(), geom.d());
    let u2 = u * u;
    let integrand = |q: f64| {
        let kap = (u2 + q * q).sqrt();
        let x = q * r;
        let (b0, b2) = (j0(x), j2(x));
        let q2 = q * q;
        let fermi = q / (4.0 * PI * u2 * kap * ((kap * d).exp() + 1.0));
        let bose = q / (2.0 * PI * u2 * kap * (kap * d).exp_m1());
        Vector([
            (q2 * (b0 - b2) + 2.0 * u2 * b0) * fermi,
            (q2 * (b0 + b2) + 2.0 * u2 * b0) * fermi,
            q2 * b0 * bose,
        ])
    };
    let sc = integrate_damped_oscillatory(integrand, 0.0, d, 2.0 * PI / r, quad)?.value.0;
    let free = free_imag_unchecked(r, u);
    Ok(CartesianGreen { par: free.par + sc[0], perp: free.perp + sc[1], zz: free.zz + sc[2] })
}
