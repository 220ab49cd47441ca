//! Adaptive integration and series summation.
//!
//! The integrator is globally adaptive: every interval carries a 15-point
//! Gauss-Legendre value on the whole interval and on each half, the error
//! estimate is three times the difference, and the interval with the worst estimate
//! relative to its share of the tolerance is bisected until the total
//! estimate is within tolerance. Integrands may be vector valued through
//! [`QuadValue`]; tolerances are then applied per component.

use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};

const GL15_NODES: [f64; 8] = [
    0.0,
    0.201_194_093_997_434_522_3,
    0.394_151_347_077_563_369_9,
    0.570_972_172_608_538_847_54,
    0.724_417_731_360_170_047_42,
    0.848_206_583_410_427_216_2,
    0.937_273_392_400_705_904_31,
    0.987_992_518_020_485_428_49,
];
const GL15_WEIGHTS: [f64; 8] = [
    0.202_578_241_925_561_272_88,
    0.198_431_485_327_111_576_46,
    0.186_161_000_015_562_211_03,
    0.166_269_205_816_993_933_55,
    0.139_570_677_926_154_314_45,
    0.107_159_220_467_171_935_01,
    0.070_366_047_488_108_124_709,
    0.030_753_241_996_117_268_355,
];

/// Tolerance contract for [`integrate_finite`] and friends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec { rel_tol: 1e-9, abs_tol: 1e-12, max_subdivisions: 2000 }
    }
}

impl QuadSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) || self.max_subdivisions < 1 {
            return Err(Error::InvalidInput("QuadSpec needs rel_tol > 0, abs_tol > 0, max_subdivisions >= 1"));
        }
        Ok(())
    }

    pub fn with_rel_tol(self, rel_tol: f64) -> Self {
        QuadSpec { rel_tol, ..self }
    }
}

/// Truncation contract for [`sum_until_converged`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSpec {
    pub rel_tol: f64,
    pub n_max: u64,
    pub consecutive_small_terms: u32,
    /// Terms at or below this magnitude count as small whatever the partial sum.
    pub abs_floor: f64,
}

impl Default for SeriesSpec {
    fn default() -> Self {
        SeriesSpec { rel_tol: 1e-10, n_max: 1_000_000, consecutive_small_terms: 3, abs_floor: 0.0 }
    }
}

impl SeriesSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || self.n_max < 1 || self.consecutive_small_terms < 1 || !(self.abs_floor >= 0.0) {
            return Err(Error::InvalidInput("SeriesSpec needs rel_tol > 0, n_max >= 1, consecutive_small_terms >= 1"));
        }
        Ok(())
    }

    pub fn with_rel_tol(self, rel_tol: f64) -> Self {
        SeriesSpec { rel_tol, ..self }
    }
}

/// Value of an integral together with its absolute error estimate (largest
/// over components) and the number of intervals used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub intervals: usize,
}

/// Partial sum of a truncated series and the number of terms taken.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum<T> {
    pub value: T,
    pub n_used: u64,
}

/// Values the integrator and the summation routine can accumulate.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    /// Componentwise absolute value.
    fn abs_parts(self) -> Self;
    /// Largest over components of `|err_i| / max(abs, rel |value_i|, floor_i)`.
    fn tolerance_ratio(err: Self, value: Self, floor: Self, rel: f64, abs: f64) -> f64;
    /// Largest component magnitude.
    fn max_norm(self) -> f64;
}

fn ratio(err: f64, value: f64, floor: f64, rel: f64, abs: f64) -> f64 {
    let e = err.abs();
    if e == 0.0 {
        return 0.0;
    }
    let tol = abs.max(rel * value.abs()).max(floor.abs());
    if tol == 0.0 {
        f64::INFINITY
    } else {
        e / tol
    }
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn abs_parts(self) -> Self {
        self.abs()
    }
    fn tolerance_ratio(err: Self, value: Self, floor: Self, rel: f64, abs: f64) -> f64 {
        ratio(err, value, floor, rel, abs)
    }
    fn max_norm(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn abs_parts(self) -> Self {
        Complex64::new(self.re.abs(), self.im.abs())
    }
    fn tolerance_ratio(err: Self, value: Self, floor: Self, rel: f64, abs: f64) -> f64 {
        // Complex values are judged by modulus so that a vanishing real or
        // imaginary part does not demand absolute accuracy on its own.
        ratio(err.norm(), value.norm(), floor.norm(), rel, abs)
    }
    fn max_norm(self) -> f64 {
        self.norm()
    }
}

impl<const N: usize> QuadValue for Vector<N> {
    fn zero() -> Self {
        Vector([0.0; N])
    }
    fn abs_parts(self) -> Self {
        Vector(self.0.map(f64::abs))
    }
    fn tolerance_ratio(err: Self, value: Self, floor: Self, rel: f64, abs: f64) -> f64 {
        (0..N).map(|i| ratio(err.0[i], value.0[i], floor.0[i], rel, abs)).fold(0.0, f64::max)
    }
    fn max_norm(self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Fixed-size real vector for integrating several components at once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vector<const N: usize>(pub [f64; N]);

impl<const N: usize> Add for Vector<N> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut v = self.0;
        for (a, b) in v.iter_mut().zip(o.0) {
            *a += b;
        }
        Vector(v)
    }
}

impl<const N: usize> Sub for Vector<N> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut v = self.0;
        for (a, b) in v.iter_mut().zip(o.0) {
            *a -= b;
        }
        Vector(v)
    }
}

impl<const N: usize> Mul<f64> for Vector<N> {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Vector(self.0.map(|a| a * s))
    }
}

struct Segment<T> {
    a: f64,
    b: f64,
    left: T,
    right: T,
    abs_left: T,
    abs_right: T,
    err: T,
}

fn gl15<T: QuadValue, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> (T, T) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let f0 = f(c);
    let mut sum = f0 * GL15_WEIGHTS[0];
    let mut sum_abs = f0.abs_parts() * GL15_WEIGHTS[0];
    for i in 1..8 {
        let dx = h * GL15_NODES[i];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        sum = sum + (f1 + f2) * GL15_WEIGHTS[i];
        sum_abs = sum_abs + (f1.abs_parts() + f2.abs_parts()) * GL15_WEIGHTS[i];
    }
    (sum * h, sum_abs * h)
}

fn segment<T: QuadValue, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64, whole: T) -> Segment<T> {
    let m = 0.5 * (a + b);
    let (left, abs_left) = gl15(f, a, m);
    let (right, abs_right) = gl15(f, m, b);
    // Near an x^(-1/2) endpoint the refined value improves only by sqrt(2) per
    // bisection, so its error can reach 1/(sqrt(2) - 1) of the difference.
    let err = (left + right - whole).abs_parts() * 3.0;
    Segment { a, b, left, right, abs_left, abs_right, err }
}

/// Adaptive integral over `[a, b]`.
pub fn integrate_finite<T: QuadValue, F: FnMut(f64) -> T>(f: F, a: f64, b: f64, spec: &QuadSpec) -> Result<Estimate<T>> {
    integrate_panels(f, &[a, b], spec)
}

/// Adaptive integral over the union of the consecutive panels given by
/// `breaks` (strictly increasing). Panels are the initial partition; each is
/// refined as needed.
pub fn integrate_panels<T: QuadValue, F: FnMut(f64) -> T>(mut f: F, breaks: &[f64], spec: &QuadSpec) -> Result<Estimate<T>> {
    spec.validate()?;
    if breaks.len() < 2 {
        return Err(Error::InvalidInput("integration needs at least one panel"));
    }
    for w in breaks.windows(2) {
        if !(w[0] < w[1]) || !w[0].is_finite() || !w[1].is_finite() {
            return Err(Error::InvalidInput("integration limits must be finite and increasing"));
        }
    }
    let mut segs: Vec<Segment<T>> = Vec::with_capacity(breaks.len() * 2);
    for w in breaks.windows(2) {
        let (whole, _) = gl15(&mut f, w[0], w[1]);
        segs.push(segment(&mut f, w[0], w[1], whole));
    }
    loop {
        let mut total = T::zero();
        let mut total_abs = T::zero();
        let mut total_err = T::zero();
        for s in &segs {
            total = total + s.left + s.right;
            total_abs = total_abs + s.abs_left + s.abs_right;
            total_err = total_err + s.err;
        }
        // Differences below a few ulps of the integral of |f| are rounding.
        let floor = total_abs * (50.0 * f64::EPSILON);
        let r = T::tolerance_ratio(total_err, total, floor, spec.rel_tol, spec.abs_tol);
        if r <= 1.0 {
            return Ok(Estimate { value: total, error: total_err.max_norm(), intervals: segs.len() });
        }
        if segs.len() >= spec.max_subdivisions {
            return Err(Error::Convergence {
                what: "adaptive quadrature",
                estimate: total.max_norm(),
                error: total_err.max_norm(),
            });
        }
        let mut worst = 0;
        let mut worst_r = -1.0;
        for (i, s) in segs.iter().enumerate() {
            let ri = T::tolerance_ratio(s.err, total, T::zero(), spec.rel_tol, spec.abs_tol);
            if ri > worst_r {
                worst_r = ri;
                worst = i;
            }
        }
        let s = segs.swap_remove(worst);
        let m = 0.5 * (s.a + s.b);
        if !(s.a < m && m < s.b) {
            return Err(Error::Convergence {
                what: "adaptive quadrature (interval underflow)",
                estimate: total.max_norm(),
                error: total_err.max_norm(),
            });
        }
        segs.push(segment(&mut f, s.a, m, s.left));
        segs.push(segment(&mut f, m, s.b, s.right));
    }
}

/// Breakpoints splitting `[a, b]` into panels no wider than half of
/// `wavelength`.
pub fn oscillatory_panels(a: f64, b: f64, wavelength: f64) -> Vec<f64> {
    let n = if wavelength.is_finite() && wavelength > 0.0 {
        ((2.0 * (b - a) / wavelength).ceil() as usize).clamp(1, 100_000)
    } else {
        1
    };
    (0..=n).map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 }).collect()
}

/// Integral over `[a, inf)` of an integrand bounded by `M exp(-scale (x - a))`.
///
/// `M` is estimated from samples over the first decay lengths. The range is
/// extended in blocks of 40 decay lengths until the envelope bound on the
/// remaining tail is a tenth of the tolerance.
pub fn integrate_semi_infinite_damped<T: QuadValue, F: FnMut(f64) -> T>(f: F, a: f64, scale: f64, spec: &QuadSpec) -> Result<Estimate<T>> {
    integrate_damped_oscillatory(f, a, scale, f64::INFINITY, spec)
}

/// As [`integrate_semi_infinite_damped`], with initial panels also limited
/// to half of `wavelength`.
pub fn integrate_damped_oscillatory<T: QuadValue, F: FnMut(f64) -> T>(
    mut f: F,
    a: f64,
    scale: f64,
    wavelength: f64,
    spec: &QuadSpec,
) -> Result<Estimate<T>> {
    spec.validate()?;
    if !(scale > 0.0) || !scale.is_finite() || !a.is_finite() {
        return Err(Error::InvalidInput("damping scale must be positive and finite"));
    }
    let decay = 1.0 / scale;
    let mut amplitude = 0.0f64;
    for j in 0..12 {
        let x = a + decay * (0.137 + 0.75 * j as f64);
        amplitude = amplitude.max(f(x).max_norm() * (scale * (x - a)).exp());
    }
    let block = 40.0 * decay;
    let panel = decay.min(0.5 * wavelength);
    let mut start = a;
    let mut value = T::zero();
    let mut error = 0.0;
    let mut intervals = 0;
    for _ in 0..40 {
        let end = start + block;
        let breaks = oscillatory_panels(start, end, 2.0 * panel);
        let part = integrate_panels(&mut f, &breaks, spec)?;
        value = value + part.value;
        error += part.error;
        intervals += part.intervals;
        let envelope = amplitude * (-(scale * (end - a))).exp() * decay;
        let local = f(end).max_norm() * decay;
        let tail = envelope.max(local);
        let tol = spec.abs_tol.max(spec.rel_tol * value.max_norm());
        if tail <= 0.1 * tol {
            return Ok(Estimate { value, error: error + tail, intervals });
        }
        start = end;
    }
    Err(Error::Convergence { what: "semi-infinite quadrature tail", estimate: value.max_norm(), error })
}

/// Sums `term(1) + term(2) + ...` until `consecutive_small_terms` successive
/// terms are each below `rel_tol` times the partial sum (or `abs_floor`).
pub fn sum_until_converged<T: QuadValue, F: FnMut(u64) -> T>(term: F, spec: &SeriesSpec) -> Result<SeriesSum<T>> {
    sum_from(1, term, spec)
}

/// As [`sum_until_converged`], starting at index `first`.
pub fn sum_from<T: QuadValue, F: FnMut(u64) -> T>(first: u64, mut term: F, spec: &SeriesSpec) -> Result<SeriesSum<T>> {
    spec.validate()?;
    let mut sum = T::zero();
    let mut small = 0;
    let mut used = 0;
    let mut n = first;
    while used < spec.n_max {
        let t = term(n);
        sum = sum + t;
        used += 1;
        n += 1;
        if T::tolerance_ratio(t, sum, T::zero(), spec.rel_tol, spec.abs_floor) <= 1.0 {
            small += 1;
            if small >= spec.consecutive_small_terms {
                return Ok(SeriesSum { value: sum, n_used: used });
            }
        } else {
            small = 0;
        }
    }
    Err(Error::Convergence { what: "series", estimate: sum.max_norm(), error: f64::NAN })
}

/// Wynn's epsilon algorithm over a stream of partial sums.
///
/// Keeps the most recent `window` partial sums; [`WynnEpsilon::estimate`]
/// returns the limit estimate from the highest even column together with an
/// error estimate from the spread of the last three estimates.
#[derive(Debug, Clone)]
pub struct WynnEpsilon {
    sums: Vec<Complex64>,
    history: Vec<Complex64>,
    window: usize,
}

impl WynnEpsilon {
    pub fn new(window: usize) -> Self {
        WynnEpsilon { sums: Vec::new(), history: Vec::new(), window: window.max(3) }
    }

    /// Appends the next partial sum and returns the updated estimate.
    pub fn push(&mut self, partial: Complex64) -> (Complex64, f64) {
        self.sums.push(partial);
        if self.sums.len() > self.window {
            self.sums.remove(0);
        }
        let e = extrapolate(&self.sums);
        self.history.push(e);
        let n = self.history.len();
        let err = if n >= 3 {
            (e - self.history[n - 2]).norm() + (e - self.history[n - 3]).norm()
        } else {
            f64::INFINITY
        };
        (e, err)
    }

    pub fn len(&self) -> usize {
        self.history.len()
    }

    pub fn is_empty(&self) -> bool {
        self.history.is_empty()
    }
}

fn extrapolate(s: &[Complex64]) -> Complex64 {
    let n = s.len();
    if n < 3 {
        return s[n - 1];
    }
    // prev = column k-1, cur = column k
    let mut prev: Vec<Complex64> = alloc::vec![Complex64::new(0.0, 0.0); n + 1];
    let mut cur: Vec<Complex64> = s.to_vec();
    let mut best = s[n - 1];
    let mut k = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let diff = cur[i + 1] - cur[i];
            if diff.norm() <= 1e-300 || !diff.norm().is_finite() {
                return best;
            }
            next.push(prev[i + 1] + Complex64::new(1.0, 0.0) / diff);
        }
        prev = cur;
        cur = next;
        k += 1;
        if k % 2 == 0 {
            let v = cur[cur.len() - 1];
            if !v.re.is_finite() || !v.im.is_finite() {
                return best;
            }
            best = v;
        }
    }
    best
}
