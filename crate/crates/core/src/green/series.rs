//! Cavity Green tensor as a series in the number of reflections.
//!
//! Order `m` contributes, per component `c`,
//!
//! ```text
//! -s_c(m) [ (ik/2pi) int_0^1 dq e^{iqkmd} P_c(q) + (k/2pi) int_0^inf dq e^{-qkmd} E_c(q) ]
//! ```
//!
//! with the brackets `P_c`, `E_c` built from `J0`, `J1(x)/x`, `J2` at
//! `x = kr sqrt(1 -+ q^2)`. The sign factor `s_c(m)` is printed ambiguously in
//! the source formulas; [`ReflectionSigns`] makes it explicit and
//! [`adjudicate_reflection_signs`] picks it by comparison with the mode sums.
//! The adjudicated rule is `(-1)^m` for `par` and `perp` and `+1` for `zz`.
//!
//! Terms fall off only like `e^{ikmd}/m`, so by default the partial sums are
//! passed through Wynn's epsilon algorithm.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::{check_positive, free_space_unchecked, CartesianGreen, CavityGeometry};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_damped_oscillatory, integrate_panels, oscillatory_panels, QuadSpec, WynnEpsilon};
use crate::special::{j1_over_x, jy01};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignRule {
    /// `(-1)^m`
    Alternating,
    /// `+1`
    Constant,
}

impl SignRule {
    fn at(self, m: usize) -> f64 {
        match self {
            SignRule::Alternating if m % 2 == 1 => -1.0,
            _ => 1.0,
        }
    }
}

/// Sign factor per component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReflectionSigns {
    pub par: SignRule,
    pub perp: SignRule,
    pub zz: SignRule,
}

impl ReflectionSigns {
    /// The reading selected by [`adjudicate_reflection_signs`]: image dipoles
    /// parallel to the plates alternate in sign, normal ones do not.
    pub const ADJUDICATED: ReflectionSigns =
        ReflectionSigns { par: SignRule::Alternating, perp: SignRule::Alternating, zz: SignRule::Constant };

    /// `(-1)^m` on every component, the literal reading with `n -> m`.
    pub const ALL_ALTERNATING: ReflectionSigns =
        ReflectionSigns { par: SignRule::Alternating, perp: SignRule::Alternating, zz: SignRule::Alternating };

    pub fn describe(&self) -> &'static str {
        match (self.par, self.perp, self.zz) {
            (SignRule::Alternating, SignRule::Alternating, SignRule::Constant) => {
                "(-1)^m for par/perp, +1 for zz"
            }
            (SignRule::Alternating, SignRule::Alternating, SignRule::Alternating) => "(-1)^m for all components",
            (SignRule::Constant, SignRule::Constant, SignRule::Constant) => "+1 for all components",
            _ => "mixed",
        }
    }
}

impl Default for ReflectionSigns {
    fn default() -> Self {
        ReflectionSigns::ADJUDICATED
    }
}

/// How the m-sum is stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    /// Wynn-accelerated; stop once the extrapolation settles to `rel_tol`,
    /// fail if it has not by `m_max`.
    Converge { rel_tol: f64 },
    /// Plain partial sum over exactly `m_max` orders.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesOptions {
    pub m_max: usize,
    pub quad: QuadSpec,
    pub truncation: Truncation,
    pub signs: ReflectionSigns,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        SeriesOptions {
            m_max: 500,
            quad: QuadSpec::default(),
            truncation: Truncation::Converge { rel_tol: 1e-10 },
            signs: ReflectionSigns::ADJUDICATED,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesResult {
    pub value: CartesianGreen<Complex64>,
    /// Estimated absolute truncation error (largest component): spread of the
    /// last extrapolations, or the last term's magnitude for
    /// [`Truncation::Fixed`].
    pub truncation: f64,
    /// Number of reflection orders summed.
    pub m_used: usize,
}

/// `(J0(x), J1(x)/x, J2(x))`.
fn j012(x: f64) -> (f64, f64, f64) {
    if x < 2.0 {
        let j1x = j1_over_x(x);
        let j0 = jy01(x).0;
        (j0, j1x, 2.0 * j1x - j0)
    } else {
        let (j0, j1, _, _) = jy01(x);
        (j0, j1 / x, 2.0 * j1 / x - j0)
    }
}

/// Order-m contribution before the sign factor.
fn order_term(kr: f64, k: f64, alpha: f64, quad: &QuadSpec) -> Result<CartesianGreen<Complex64>> {
    let prop = |q: f64| {
        let q2 = q * q;
        let (j0, j1x, j2) = j012(kr * (1.0 - q2).max(0.0).sqrt());
        let ph = Complex64::from_polar(1.0, alpha * q);
        CartesianGreen {
            par: ph * ((1.0 + q2) * j1x - q2 * j2),
            perp: ph * ((1.0 + q2) * j1x - j2),
            zz: ph * ((1.0 - q2) * j0),
        }
    };
    let lambda = 2.0 * PI / alpha.max(kr).max(1e-300);
    let p = integrate_panels(prop, &oscillatory_panels(0.0, 1.0, lambda), quad)?.value;

    let evan = |q: f64| {
        let q2 = q * q;
        let (j0, j1x, j2) = j012(kr * (1.0 + q2).sqrt());
        let e = (-alpha * q).exp();
        CartesianGreen {
            par: e * ((1.0 - q2) * j1x + q2 * j2),
            perp: e * ((1.0 - q2) * j1x - j2),
            zz: e * ((1.0 + q2) * j0),
        }
    };
    let wavelength = if kr > 0.0 { 2.0 * PI / kr } else { f64::INFINITY };
    let e = integrate_damped_oscillatory(evan, 0.0, alpha, wavelength, quad)?.value;

    let ik = Complex64::new(0.0, k / (2.0 * PI));
    let kk = k / (2.0 * PI);
    Ok(CartesianGreen {
        par: -(ik * p.par + kk * e.par),
        perp: -(ik * p.perp + kk * e.perp),
        zz: -(ik * p.zz + kk * e.zz),
    })
}

/// Reflection-series representation at real `k`.
pub fn green_reflection_series(geom: &CavityGeometry, k: f64, opts: &SeriesOptions) -> Result<SeriesResult> {
    check_positive(k, "k must be positive and finite")?;
    opts.quad.validate()?;
    let (r, d) = (geom.r(), geom.d());
    let free = free_space_unchecked(r, k);
    let mut sum = free;
    if opts.m_max == 0 {
        return Ok(SeriesResult { value: free, truncation: f64::INFINITY, m_used: 0 });
    }
    let kr = k * r;
    let s = opts.signs;
    let mut wynn = [WynnEpsilon::new(50), WynnEpsilon::new(50), WynnEpsilon::new(50)];
    let mut last = CartesianGreen { par: 0.0, perp: 0.0, zz: 0.0 };
    let mut estimates: Vec<Complex64> = alloc::vec![Complex64::new(0.0, 0.0); 3];
    for m in 1..=opts.m_max {
        let t = order_term(kr, k, k * m as f64 * d, &opts.quad)?;
        let t = CartesianGreen { par: t.par * s.par.at(m), perp: t.perp * s.perp.at(m), zz: t.zz * s.zz.at(m) };
        sum = sum + t;
        last = t.map(|z| z.norm());
        if let Truncation::Converge { rel_tol } = opts.truncation {
            let mut errs = [0.0; 3];
            for (i, partial) in sum.to_array().into_iter().enumerate() {
                let (e, err) = wynn[i].push(partial);
                estimates[i] = e;
                errs[i] = err;
            }
            let scale = estimates.iter().fold(0.0f64, |a, z| a.max(z.norm()));
            let settled = (0..3).all(|i| errs[i] <= rel_tol * estimates[i].norm() + 1e-14 * scale);
            if m >= 6 && settled {
                let value = CartesianGreen { par: estimates[0], perp: estimates[1], zz: estimates[2] };
                return Ok(SeriesResult { value, truncation: errs.into_iter().fold(0.0, f64::max), m_used: m });
            }
        }
    }
    match opts.truncation {
        Truncation::Fixed => Ok(SeriesResult {
            value: sum,
            truncation: last.par.max(last.perp).max(last.zz),
            m_used: opts.m_max,
        }),
        Truncation::Converge { .. } => Err(Error::Convergence {
            what: "reflection series",
            estimate: estimates.iter().fold(0.0f64, |a, z| a.max(z.norm())),
            error: f64::NAN,
        }),
    }
}

/// Chooses the sign rule per component by comparing each candidate reading
/// with the mode-sum representation at `(kr, kd) = (1, 5)`.
pub fn adjudicate_reflection_signs(quad: &QuadSpec) -> Result<ReflectionSigns> {
    use super::modesum::{green_modesum, ModeSumOptions};
    let geom = CavityGeometry::new(1.0, 5.0)?;
    let reference = green_modesum(&geom, 1.0, &ModeSumOptions::default())?;
    let mut best = [(f64::INFINITY, SignRule::Alternating); 3];
    for rule in [SignRule::Alternating, SignRule::Constant] {
        let opts = SeriesOptions {
            quad: *quad,
            signs: ReflectionSigns { par: rule, perp: rule, zz: rule },
            ..SeriesOptions::default()
        };
        let v = match green_reflection_series(&geom, 1.0, &opts) {
            Ok(v) => v.value,
            Err(Error::Convergence { .. }) => continue,
            Err(e) => return Err(e),
        };
        let diffs = [
            (v.par - reference.par).norm() / reference.par.norm(),
            (v.perp - reference.perp).norm() / reference.perp.norm(),
            (v.zz - reference.zz).norm() / reference.zz.norm(),
        ];
        for i in 0..3 {
            if diffs[i] < best[i].0 {
                best[i] = (diffs[i], rule);
            }
        }
    }
    if best.iter().any(|b| !(b.0 < 1e-5)) {
        return Err(Error::Convergence { what: "sign adjudication", estimate: 0.0, error: best[0].0.max(best[1].0).max(best[2].0) });
    }
    Ok(ReflectionSigns { par: best[0].1, perp: best[1].1, zz: best[2].1 })
}
