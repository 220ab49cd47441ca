//! Electrostatic interaction of two dipoles induced by a uniform static
//! field in the cavity.
//!
//! With `x = r/d`, the dimensionless potentials are
//!
//! ```text
//! V00 = 4 sum_{n>=1} n^2 K0(2 pi x n)
//! V++ = -1/2 sum_{n odd} [n^2 K0(pi x n) + 2/(pi x) n K1(pi x n)]
//! V+- = -1/2 sum_{n odd} n^2 K0(pi x n)
//! ```
//!
//! tending to `d^3/(4 pi^2 r^3)`, `-3 d^3/(8 pi^2 r^3)`, `-d^3/(8 pi^2 r^3)`
//! as `x -> 0`.

use core::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::atoms::{PhysicalConstants, TwoAtomConfig};
use crate::error::{Error, Result};
use crate::green::CavityGeometry;
use crate::quadrature::{sum_from, SeriesSpec};
use crate::special::k01;
use crate::vdw::{ChannelContribution, EnergyResult};

/// Below this `r/d` the sums are replaced by their free-space limits.
pub const FREE_LIMIT_BELOW: f64 = 0.005;

/// Uniform static field, spherical components `E^0 = E_z`,
/// `E^+- = (E_x -+ i E_y)/sqrt2` (V/m). Only real fields are accepted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticField {
    zero: f64,
    plus: Complex64,
}

impl StaticField {
    pub fn from_cartesian(ex: f64, ey: f64, ez: f64) -> Result<Self> {
        if !(ex.is_finite() && ey.is_finite() && ez.is_finite()) {
            return Err(Error::InvalidInput("static field must be finite"));
        }
        Ok(StaticField { zero: ez, plus: Complex64::new(ex, -ey) * FRAC_1_SQRT_2 })
    }

    /// Rejects components that do not come from a real Cartesian field
    /// (`E^0` real, `E^- = conj E^+`).
    pub fn from_spherical(zero: Complex64, plus: Complex64, minus: Complex64) -> Result<Self> {
        let scale = zero.norm().max(plus.norm()).max(minus.norm());
        if zero.im.abs() > 1e-12 * scale || (minus - plus.conj()).norm() > 1e-12 * scale {
            return Err(Error::InvalidInput("complex static fields are not supported"));
        }
        let f = StaticField { zero: zero.re, plus };
        if !(f.zero.is_finite() && plus.re.is_finite() && plus.im.is_finite()) {
            return Err(Error::InvalidInput("static field must be finite"));
        }
        Ok(f)
    }

    pub fn zero(&self) -> f64 {
        self.zero
    }

    pub fn plus(&self) -> Complex64 {
        self.plus
    }

    pub fn minus(&self) -> Complex64 {
        self.plus.conj()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticPotentialTensor {
    pub v00: f64,
    pub vpp: f64,
    pub vpm: f64,
    /// Terms summed per component `(00, ++, +-)`; zero in the free limit.
    pub n_used: [u64; 3],
    /// Set when `r/d < FREE_LIMIT_BELOW` and the free-space forms were used.
    pub free_limit: bool,
    /// Bound on the absolute error of the free-limit substitution.
    pub error_bound: f64,
}

/// Free-space limits of the three components.
pub fn v_static_free(geom: &CavityGeometry) -> StaticPotentialTensor {
    let x3 = (geom.r() / geom.d()).powi(3);
    let p2 = PI * PI;
    StaticPotentialTensor {
        v00: 1.0 / (4.0 * p2 * x3),
        vpp: -3.0 / (8.0 * p2 * x3),
        vpm: -1.0 / (8.0 * p2 * x3),
        n_used: [0; 3],
        free_limit: true,
        error_bound: 0.0,
    }
}

fn sums(x: f64, spec: &SeriesSpec) -> Result<StaticPotentialTensor> {
    let v00 = sum_from(1, |n| {
        let n = n as f64;
        n * n * k01(2.0 * PI * x * n).0
    }, spec)?;
    let odd = sum_from(
        0,
        |m| {
            let n = (2 * m + 1) as f64;
            let (k0, k1) = k01(PI * x * n);
            crate::quadrature::Vector([n * n * k0 + 2.0 / (PI * x) * n * k1, n * n * k0])
        },
        spec,
    )?;
    Ok(StaticPotentialTensor {
        v00: 4.0 * v00.value,
        vpp: -0.5 * odd.value.0[0],
        vpm: -0.5 * odd.value.0[1],
        n_used: [v00.n_used, odd.n_used, odd.n_used],
        free_limit: false,
        error_bound: 0.0,
    })
}

/// The three static potentials as functions of `r/d`.
pub fn v_static_dimensionless(geom: &CavityGeometry, spec: &SeriesSpec) -> Result<StaticPotentialTensor> {
    let x = geom.r() / geom.d();
    if x >= FREE_LIMIT_BELOW {
        return sums(x, spec);
    }
    // The cavity correction relative to free space shrinks like x^3.
    let edge = CavityGeometry::new(FREE_LIMIT_BELOW, 1.0)?;
    let at_edge = sums(FREE_LIMIT_BELOW, spec)?;
    let free_edge = v_static_free(&edge);
    let dev = [
        (at_edge.v00 / free_edge.v00 - 1.0).abs(),
        (at_edge.vpp / free_edge.vpp - 1.0).abs(),
        (at_edge.vpm / free_edge.vpm - 1.0).abs(),
    ];
    let mut out = v_static_free(geom);
    let shrink = (x / FREE_LIMIT_BELOW).powi(3);
    out.error_bound = 2.0 * shrink * (dev[0] * out.v00.abs()).max(dev[1] * out.vpp.abs()).max(dev[2] * out.vpm.abs());
    Ok(out)
}

/// Static-field interaction energy (J); `w_a = w_b = phase_shift`.
///
/// `4 pi/(eps0 hbar^2 d^3) sum_ij 1/(w_ia w_jb) [ (|d+_ia|^2 |d+_jb|^2 (E+)^2 + |d-_ia|^2 |d-_jb|^2 (E-)^2) V++
///  + |d0_ia|^2 |d0_jb|^2 (E0)^2 V00 + (|d+_ia|^2 |d-_jb|^2 + |d-_ia|^2 |d+_jb|^2) E- E+ V+- ]`.
///
/// For a real field `(E+)^2` and `(E-)^2` are complex conjugates; the real
/// part of the bracket is kept.
pub fn w_static_full(
    config: &TwoAtomConfig,
    field: &StaticField,
    spec: &SeriesSpec,
    constants: &PhysicalConstants,
) -> Result<EnergyResult> {
    config.validate().into_result()?;
    let v = v_static_dimensionless(&config.geometry, spec)?;
    let d = config.geometry.d();
    let pref = 4.0 * PI / (constants.epsilon0 * constants.hbar * constants.hbar * d.powi(3));
    let (a_atom, b_atom, a, b) = (&config.atom_a, &config.atom_b, config.state_a, config.state_b);
    let (e0, ep, em) = (field.zero(), field.plus(), field.minus());
    let mut out = EnergyResult::default();
    for i in a_atom.coupled_to(a) {
        for j in b_atom.coupled_to(b) {
            let w_ia = a_atom.omega(i)? - a_atom.omega(a)?;
            let w_jb = b_atom.omega(j)? - b_atom.omega(b)?;
            if w_ia == 0.0 || w_jb == 0.0 {
                return Err(Error::Degenerate { what: "zero transition frequency" });
            }
            let da = a_atom.dipole(i, a);
            let db = b_atom.dipole(j, b);
            let (ap, am, a0) = (da.plus.norm_sqr(), da.minus.norm_sqr(), da.zero.norm_sqr());
            let (bp, bm, b0) = (db.plus.norm_sqr(), db.minus.norm_sqr(), db.zero.norm_sqr());
            let bracket = (ep * ep * (ap * bp) + em * em * (am * bm)) * v.vpp
                + Complex64::from(a0 * b0 * e0 * e0 * v.v00)
                + em * ep * ((ap * bm + am * bp) * v.vpm);
            let w = pref / (w_ia * w_jb) * bracket.re;
            out.push(ChannelContribution { family: "static", i, j, k: 0.0, w_a: w, w_b: w, phase_shift: w });
        }
    }
    Ok(out)
}
