//! Green tensor of a perfectly reflecting planar cavity with both points on
//! the mid-plane, separated by `r` parallel to the plates.
//!
//! Sign convention: `G = -G_std`, where `G_std` is the textbook dyadic Green
//! function `e^{ikR}/(4 pi R) [(1 + i/kR - 1/k^2R^2) I + (3/k^2R^2 - 3i/kR - 1) R R]`.
//! Three components are independent: `par` (along the separation), `perp`
//! (in-plane, normal to it) and `zz` (normal to the plates).
//!
//! Representations:
//! * [`im_green_modesum`] / [`re_green_modesum`]: finite Bessel-J sums for the
//!   imaginary part, Bessel-Y plus Bessel-K sums for the real part.
//! * [`green_reflection_series`]: free-space term plus a sum over the number
//!   of reflections `m`.
//! * [`green_imaginary_freq`]: imaginary wavenumber `k = iu`, either as a
//!   zeta integral or as an evanescent mode sum.
//! * [`kramers_kronig_re`] and [`greens_q_integral_oracle`] exist to check the
//!   others.
//!
//! Only the products `kr`, `kd` matter: `G(r, d; k) = G(r/L, d/L; kL) / L`.

use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::quadrature::QuadValue;

mod imaginary;
mod kramers_kronig;
mod modesum;
mod series;

pub use imaginary::{
    free_space_green_imag, green_imaginary_freq, green_imaginary_freq_with, greens_q_integral_oracle,
    ImagFreqMethod,
};
pub use kramers_kronig::{kramers_kronig_re, kramers_kronig_transform, ImagMode};
pub use modesum::{d_dk_k2_re_free, d_dk_k2_re_green, green_modesum, im_green_modesum, re_green_modesum, DerivativeCheck, ModeSumOptions, DERIVATIVE_TOL};
pub use series::{
    adjudicate_reflection_signs, green_reflection_series, ReflectionSigns, SeriesOptions, SeriesResult, SignRule,
    Truncation,
};

/// Interatomic distance `r` and plate separation `d`; atoms sit at `z = d/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityGeometry {
    r: f64,
    d: f64,
}

impl CavityGeometry {
    pub fn new(r: f64, d: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidInput("interatomic distance r must be positive and finite"));
        }
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::InvalidInput("plate separation d must be positive and finite"));
        }
        Ok(CavityGeometry { r, d })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// The same geometry with lengths divided by `length`.
    pub fn scaled(&self, length: f64) -> Self {
        CavityGeometry { r: self.r / length, d: self.d / length }
    }
}

/// Wavenumber on the real axis (`k = omega/c`) or on the positive imaginary
/// axis (`k = iu`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Wavenumber {
    Real(f64),
    Imaginary(f64),
}

impl Wavenumber {
    pub fn real(k: f64) -> Result<Self> {
        check_positive(k, "wavenumber k must be positive and finite")?;
        Ok(Wavenumber::Real(k))
    }

    pub fn imaginary(u: f64) -> Result<Self> {
        check_positive(u, "imaginary wavenumber u must be positive and finite")?;
        Ok(Wavenumber::Imaginary(u))
    }

    pub fn magnitude(&self) -> f64 {
        match *self {
            Wavenumber::Real(k) | Wavenumber::Imaginary(k) => k,
        }
    }
}

pub(crate) fn check_positive(x: f64, msg: &'static str) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(msg))
    }
}

/// Cartesian components `(par, perp, zz)`; off-diagonal components vanish.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartesianGreen<T> {
    pub par: T,
    pub perp: T,
    pub zz: T,
}

/// Spherical components `(pm, pp, zz)`, with `G_{+-} = G_{-+}` and
/// `G_{++} = G_{--}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalGreen<T> {
    pub pm: T,
    pub pp: T,
    pub zz: T,
}

impl<T: Copy> CartesianGreen<T> {
    pub fn new(par: T, perp: T, zz: T) -> Self {
        CartesianGreen { par, perp, zz }
    }

    pub fn map<U>(self, f: impl Fn(T) -> U) -> CartesianGreen<U> {
        CartesianGreen { par: f(self.par), perp: f(self.perp), zz: f(self.zz) }
    }

    pub fn zip<U: Copy, V>(self, o: CartesianGreen<U>, f: impl Fn(T, U) -> V) -> CartesianGreen<V> {
        CartesianGreen { par: f(self.par, o.par), perp: f(self.perp, o.perp), zz: f(self.zz, o.zz) }
    }

    pub fn to_array(self) -> [T; 3] {
        [self.par, self.perp, self.zz]
    }
}

impl<T: Copy> SphericalGreen<T> {
    pub fn map<U>(self, f: impl Fn(T) -> U) -> SphericalGreen<U> {
        SphericalGreen { pm: f(self.pm), pp: f(self.pp), zz: f(self.zz) }
    }

    pub fn to_array(self) -> [T; 3] {
        [self.pm, self.pp, self.zz]
    }
}

impl CartesianGreen<Complex64> {
    pub fn re(&self) -> CartesianGreen<f64> {
        self.map(|z| z.re)
    }

    pub fn im(&self) -> CartesianGreen<f64> {
        self.map(|z| z.im)
    }

    pub fn from_parts(re: CartesianGreen<f64>, im: CartesianGreen<f64>) -> Self {
        re.zip(im, Complex64::new)
    }
}

impl<T: Copy + Add<Output = T>> Add for CartesianGreen<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        self.zip(o, |a, b| a + b)
    }
}

impl<T: Copy + Sub<Output = T>> Sub for CartesianGreen<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self.zip(o, |a, b| a - b)
    }
}

impl<T: Copy + Mul<f64, Output = T>> Mul<f64> for CartesianGreen<T> {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.map(|a| a * s)
    }
}

impl<T: QuadValue> QuadValue for CartesianGreen<T> {
    fn zero() -> Self {
        CartesianGreen { par: T::zero(), perp: T::zero(), zz: T::zero() }
    }
    fn abs_parts(self) -> Self {
        self.map(T::abs_parts)
    }
    fn tolerance_ratio(err: Self, value: Self, floor: Self, rel: f64, abs: f64) -> f64 {
        T::tolerance_ratio(err.par, value.par, floor.par, rel, abs)
            .max(T::tolerance_ratio(err.perp, value.perp, floor.perp, rel, abs))
            .max(T::tolerance_ratio(err.zz, value.zz, floor.zz, rel, abs))
    }
    fn max_norm(self) -> f64 {
        self.par.max_norm().max(self.perp.max_norm()).max(self.zz.max_norm())
    }
}

/// `G_{+-} = (G_par + G_perp)/2`, `G_{++} = (G_par - G_perp)/2`, `G_00` unchanged.
pub fn to_spherical<T>(g: CartesianGreen<T>) -> SphericalGreen<T>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    SphericalGreen { pm: (g.par + g.perp) * 0.5, pp: (g.par - g.perp) * 0.5, zz: g.zz }
}

/// Inverse of [`to_spherical`].
pub fn from_spherical<T>(g: SphericalGreen<T>) -> CartesianGreen<T>
where
    T: Copy + Add<Output = T> + Sub<Output = T>,
{
    CartesianGreen { par: g.pm + g.pp, perp: g.pm - g.pp, zz: g.zz }
}

/// Free-space Green tensor at real `k`:
/// `par = e^{ikr}/(-4 pi k^2) [2/r^3 - 2ik/r^2]`,
/// `perp = zz = e^{ikr}/(-4 pi k^2) [-1/r^3 + ik/r^2 + k^2/r]`.
pub fn free_space_green(r: f64, k: f64) -> Result<CartesianGreen<Complex64>> {
    check_positive(r, "r must be positive and finite")?;
    check_positive(k, "k must be positive and finite")?;
    Ok(free_space_unchecked(r, k))
}

pub(crate) fn free_space_unchecked(r: f64, k: f64) -> CartesianGreen<Complex64> {
    let pref = Complex64::from_polar(1.0, k * r) / (-4.0 * core::f64::consts::PI * k * k);
    let r2 = r * r;
    let r3 = r2 * r;
    let par = pref * Complex64::new(2.0 / r3, -2.0 * k / r2);
    let perp = pref * Complex64::new(-1.0 / r3 + k * k / r, k / r2);
    CartesianGreen { par, perp, zz: perp }
}

/// Guard band around the mode thresholds `k = n pi / d`, as a fraction of
/// `pi/d` (so the excluded interval is `|kd/pi - n| < width`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdGuard {
    pub width: f64,
}

impl Default for ThresholdGuard {
    fn default() -> Self {
        ThresholdGuard { width: 1e-6 }
    }
}

impl ThresholdGuard {
    /// Fails with [`Error::Threshold`] when `k` lies in a guard band. The
    /// thresholds of `par`/`perp` (odd n) and `zz` (even n) together cover
    /// every positive integer n.
    pub fn check(&self, k: f64, d: f64) -> Result<()> {
        let x = k * d / core::f64::consts::PI;
        let n = x.round();
        if n >= 1.0 && (x - n).abs() < self.width {
            return Err(Error::Threshold { kd_over_pi: x, nearest: n as u64 });
        }
        Ok(())
    }

    /// Distance in `k` from the nearest threshold.
    pub fn distance(k: f64, d: f64) -> f64 {
        let step = core::f64::consts::PI / d;
        let x = k / step;
        let n = x.round().max(1.0);
        (x - n).abs() * step
    }
}
