//! Real part of the cavity Green tensor rebuilt from its imaginary part.
//!
//! `k^2 G(k)` is analytic in the upper half plane, so
//! `k^2 Re G(k) = (2/pi) PV int_0^inf k' [k'^2 Im G(k')] / (k'^2 - k^2) dk'`.
//! The imaginary part is a sum of mode contributions switching on at
//! cutoffs `a_n`; with `kappa'^2 = k'^2 - a_n^2` each becomes a principal
//! value integral over `kappa'` with its pole at `kappa0^2 = k^2 - a_n^2`.
//! Modes with `a_n > k` have no pole and give the evanescent part.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::{check_positive, CartesianGreen, CavityGeometry};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_panels, oscillatory_panels, QuadSpec, WynnEpsilon};
use crate::special::{j0, j1};

/// One mode of the imaginary part: for `k' > cutoff`, with
/// `kappa' = sqrt(k'^2 - cutoff^2)`,
/// `Im G(k') = (1/k'^2) [a J0(r kappa') + b kappa'^2 J0(r kappa') + c kappa' J1(r kappa')/r]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImagMode {
    pub cutoff: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// `Re G(k)` at separation `r` from the imaginary part given by `modes`.
pub fn kramers_kronig_transform(modes: &[ImagMode], r: f64, k: f64, quad: &QuadSpec) -> Result<f64> {
    check_positive(r, "r must be positive and finite")?;
    check_positive(k, "k must be positive and finite")?;
    quad.validate()?;
    let mut total = 0.0;
    for m in modes {
        if m.a == 0.0 && m.b == 0.0 && m.c == 0.0 {
            continue;
        }
        let kap02 = k * k - m.cutoff * m.cutoff;
        // The b term: kappa^2/(kappa^2 - kappa0^2) = 1 + kappa0^2/(...), and
        // int kappa J0(r kappa) dkappa vanishes (Abel sense).
        let a_eff = m.a + m.b * kap02;
        let mut v = 0.0;
        if a_eff != 0.0 {
            v += a_eff * pv_integral(|x| x * j0(r * x), kap02, r, quad)?;
        }
        if m.c != 0.0 {
            // kappa^2 J1/(kappa^2 - kappa0^2) = J1 + kappa0^2 J1/(...), int J1 = 1/r.
            v += m.c / r * (1.0 / r + kap02 * pv_integral(|x| j1(r * x), kap02, r, quad)?);
        }
        total += 2.0 / PI * v;
    }
    Ok(total / (k * k))
}

/// `PV int_0^inf g(x) / (x^2 - kap02) dx` for `g` oscillating with period
/// `2 pi / r` and decaying at least like `x^{-1/2}`.
fn pv_integral<G: Fn(f64) -> f64>(g: G, kap02: f64, r: f64, quad: &QuadSpec) -> Result<f64> {
    let half_period = PI / r;
    let (head, start) = if kap02 > 0.0 {
        let k0 = kap02.sqrt();
        // Fold the pole: x = k0 + t and x = k0 - t over t in (0, k0).
        let folded = |t: f64| g(k0 + t) / (t * (2.0 * k0 + t)) - g(k0 - t) / (t * (2.0 * k0 - t));
        let v = integrate_panels(folded, &oscillatory_panels(0.0, k0, 2.0 * half_period), quad)?.value;
        (v, 2.0 * k0)
    } else {
        (0.0, 0.0)
    };
    let f = |x: f64| g(x) / (x * x - kap02);
    let mut wynn = WynnEpsilon::new(40);
    let mut partial = head;
    let mut a = start;
    // The first chunk up to the next multiple of the half period keeps the
    // later chunks aligned.
    let mut b = ((start / half_period).floor() + 1.0) * half_period;
    let mut last = (partial, f64::INFINITY);
    for j in 0..4000 {
        partial += integrate_panels(&f, &oscillatory_panels(a, b, 2.0 * half_period), quad)?.value;
        let (est, err) = wynn.push(Complex64::new(partial, 0.0));
        last = (est.re, err);
        if j >= 6 && err <= quad.rel_tol * est.re.abs() + quad.abs_tol {
            return Ok(est.re);
        }
        a = b;
        b += half_period;
    }
    Err(Error::Convergence { what: "principal value tail", estimate: last.0, error: last.1 })
}

fn cavity_modes(d: f64, k: f64, r: f64) -> (Vec<ImagMode>, Vec<ImagMode>, Vec<ImagMode>) {
    // Evanescent modes fall off like exp(-n pi r/d).
    let n_max = (k * d / PI).floor() as usize + (30.0 * d / (PI * r)).ceil() as usize + 2;
    let f = -2.0 / (4.0 * d);
    let mut par = Vec::new();
    let mut perp = Vec::new();
    let mut zz = alloc::vec![ImagMode { cutoff: 0.0, a: 0.0, b: -1.0 / (4.0 * d), c: 0.0 }];
    for n in 1..=n_max {
        let a = n as f64 * PI / d;
        if n % 2 == 1 {
            par.push(ImagMode { cutoff: a, a: f * a * a, b: 0.0, c: f });
            perp.push(ImagMode { cutoff: a, a: f * a * a, b: f, c: -f });
        } else {
            zz.push(ImagMode { cutoff: a, a: 0.0, b: -1.0 / (2.0 * d), c: 0.0 });
        }
    }
    (par, perp, zz)
}

/// `Re G(r, d; k)` of the cavity by Kramers-Kronig from the imaginary mode
/// sums. An independent check on the Bessel-Y/K real part; slow.
pub fn kramers_kronig_re(geom: &CavityGeometry, k: f64, quad: &QuadSpec) -> Result<CartesianGreen<f64>> {
    check_positive(k, "k must be positive and finite")?;
    let (r, d) = (geom.r(), geom.d());
    let (par, perp, zz) = cavity_modes(d, k, r);
    Ok(CartesianGreen {
        par: kramers_kronig_transform(&par, r, k, quad)?,
        perp: kramers_kronig_transform(&perp, r, k, quad)?,
        zz: kramers_kronig_transform(&zz, r, k, quad)?,
    })
}
