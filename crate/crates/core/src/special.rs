//! Bessel functions of real argument: `J0`, `J1`, `J2`, `Y0`, `Y1`, `K0`, `K1`.
//!
//! Below `x = 2` every function comes from its ascending series. Between 2 and
//! 25 the ordinary functions use Steed's method: CF1 gives `J0'/J0`, CF2 gives
//! `p + iq = (J0' + iY0')/(J0 + iY0)`, and the Wronskian fixes the
//! normalisation. Above 25 the Hankel asymptotic expansion is used. `K0` and
//! `K1` use Temme's form of CF2 above `x = 2`.

use core::f64::consts::{FRAC_2_PI, PI};

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_MAX: f64 = 2.0;
const ASYMPTOTIC_MIN: f64 = 25.0;
const EPS: f64 = 1.0e-16;
const FPMIN: f64 = 1.0e-300;
const MAXIT: usize = 100_000;

/// Orders that appear in the cavity formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselOrder {
    Zero,
    One,
    Two,
}

/// `J_n(x)` for n = 0, 1, 2. Defined for every real `x`.
pub fn bessel_j(order: BesselOrder, x: f64) -> f64 {
    match order {
        BesselOrder::Zero => j0(x),
        BesselOrder::One => j1(x),
        BesselOrder::Two => j2(x),
    }
}

/// `Y_n(x)` for n = 0, 1 and `x > 0`.
pub fn bessel_y(order: BesselOrder, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain { what: "bessel_y", value: x });
    }
    match order {
        BesselOrder::Zero => Ok(y0(x)),
        BesselOrder::One => Ok(y1(x)),
        BesselOrder::Two => Err(Error::InvalidInput("Y2 is not provided")),
    }
}

/// `K_n(x)` for n = 0, 1 and `x > 0`.
pub fn bessel_k(order: BesselOrder, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain { what: "bessel_k", value: x });
    }
    match order {
        BesselOrder::Zero => Ok(k0(x)),
        BesselOrder::One => Ok(k1(x)),
        BesselOrder::Two => Err(Error::InvalidInput("K2 is not provided")),
    }
}

pub fn j0(x: f64) -> f64 {
    jy01(x.abs()).0
}

pub fn j1(x: f64) -> f64 {
    let v = jy01(x.abs()).1;
    if x < 0.0 {
        -v
    } else {
        v
    }
}

pub fn j2(x: f64) -> f64 {
    let ax = x.abs();
    if ax < SERIES_MAX {
        return j_series(2, ax);
    }
    let (j0, j1, _, _) = jy01(ax);
    2.0 * j1 / ax - j0
}

/// `J1(x)/x`, finite at the origin.
pub fn j1_over_x(x: f64) -> f64 {
    let ax = x.abs();
    if ax < SERIES_MAX {
        // J1(x)/x = (1/2) sum (-x^2/4)^k / (k!(k+1)!)
        let t2 = -0.25 * ax * ax;
        let mut term = 0.5;
        let mut sum = term;
        for k in 1..60 {
            let kf = k as f64;
            term *= t2 / (kf * (kf + 1.0));
            sum += term;
            if term.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        return sum;
    }
    jy01(ax).1 / ax
}

pub fn y0(x: f64) -> f64 {
    if !(x > 0.0) {
        return f64::NAN;
    }
    jy01(x).2
}

pub fn y1(x: f64) -> f64 {
    if !(x > 0.0) {
        return f64::NAN;
    }
    jy01(x).3
}

pub fn k0(x: f64) -> f64 {
    k01(x).0
}

pub fn k1(x: f64) -> f64 {
    k01(x).1
}

/// `(J0, J1, Y0, Y1)` at `x >= 0`. The `Y` entries are `-inf` at the origin.
pub fn jy01(x: f64) -> (f64, f64, f64, f64) {
    if x == 0.0 {
        return (1.0, 0.0, f64::NEG_INFINITY, f64::NEG_INFINITY);
    }
    if x < SERIES_MAX {
        let j0 = j_series(0, x);
        let j1 = j_series(1, x);
        (j0, j1, y0_series(x, j0), y1_series(x, j1))
    } else if x < ASYMPTOTIC_MIN {
        steed_jy0(x)
    } else {
        hankel_jy01(x)
    }
}

/// `(K0, K1)` at `x > 0`; NaN otherwise.
pub fn k01(x: f64) -> (f64, f64) {
    if !(x > 0.0) {
        return (f64::NAN, f64::NAN);
    }
    if x <= SERIES_MAX {
        k_series(x)
    } else {
        steed_k0(x)
    }
}

fn j_series(n: u32, x: f64) -> f64 {
    let t = 0.5 * x;
    let mut term = match n {
        0 => 1.0,
        1 => t,
        _ => 0.5 * t * t,
    };
    let nf = n as f64;
    let t2 = -t * t;
    let mut sum = term;
    for k in 1..80 {
        let kf = k as f64;
        term *= t2 / (kf * (kf + nf));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn y0_series(x: f64, j0: f64) -> f64 {
    let t2 = 0.25 * x * x;
    let mut p = 1.0;
    let mut h = 0.0;
    let mut sum = 0.0;
    for k in 1..80 {
        let kf = k as f64;
        p *= -t2 / (kf * kf);
        h += 1.0 / kf;
        let term = -p * h;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    FRAC_2_PI * (((0.5 * x).ln() + EULER_GAMMA) * j0 + sum)
}

fn y1_series(x: f64, j1: f64) -> f64 {
    let t = 0.5 * x;
    let t2 = -t * t;
    let mut q = t;
    let mut h = 0.0;
    let mut sum = q * (1.0 - 2.0 * EULER_GAMMA);
    for k in 1..80 {
        let kf = k as f64;
        q *= t2 / (kf * (kf + 1.0));
        h += 1.0 / kf;
        let term = q * (2.0 * h + 1.0 / (kf + 1.0) - 2.0 * EULER_GAMMA);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    -FRAC_2_PI / x + FRAC_2_PI * (0.5 * x).ln() * j1 - sum / PI
}

fn k_series(x: f64) -> (f64, f64) {
    let t = 0.5 * x;
    let t2 = t * t;
    let lt = t.ln();
    // K0
    let mut p = 1.0;
    let mut h = 0.0;
    let mut i0 = 1.0;
    let mut s0 = 0.0;
    // K1
    let mut q = 1.0;
    let mut i1 = 1.0;
    let mut s1 = 1.0 - 2.0 * EULER_GAMMA;
    for k in 1..80 {
        let kf = k as f64;
        p *= t2 / (kf * kf);
        q *= t2 / (kf * (kf + 1.0));
        h += 1.0 / kf;
        i0 += p;
        s0 += p * h;
        i1 += q;
        s1 += q * (2.0 * h + 1.0 / (kf + 1.0) - 2.0 * EULER_GAMMA);
        if p < 1e-17 * s0.abs().max(i0) && q < 1e-17 * s1.abs().max(i1) {
            break;
        }
    }
    let k0 = -(lt + EULER_GAMMA) * i0 + s0;
    let k1 = 1.0 / x + lt * t * i1 - 0.5 * t * s1;
    (k0, k1)
}

fn steed_jy0(x: f64) -> (f64, f64, f64, f64) {
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    // CF1: f = J0'/J0
    let mut isign = 1.0;
    let mut h = FPMIN;
    let mut b = 0.0;
    let mut d = 0.0;
    let mut c = h;
    for _ in 0..MAXIT {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    let f = h;

    // CF2: p + iq
    let mut a = 0.25;
    let mut p = -0.5 * xi;
    let mut q = 1.0;
    let br = 2.0 * x;
    let mut bi = 2.0;
    let mut fact = a * xi / (p * p + q * q);
    let mut cr = br + q * fact;
    let mut ci = bi + p * fact;
    let mut den = br * br + bi * bi;
    let mut dr = br / den;
    let mut di = -bi / den;
    let mut dlr = cr * dr - ci * di;
    let mut dli = cr * di + ci * dr;
    let mut temp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = temp;
    for i in 2..MAXIT {
        a += 2.0 * (i - 1) as f64;
        bi += 2.0;
        dr = a * dr + br;
        di = a * di + bi;
        if dr.abs() + di.abs() < FPMIN {
            dr = FPMIN;
        }
        fact = a / (cr * cr + ci * ci);
        cr = br + cr * fact;
        ci = bi - ci * fact;
        if cr.abs() + ci.abs() < FPMIN {
            cr = FPMIN;
        }
        den = dr * dr + di * di;
        dr /= den;
        di /= -den;
        dlr = cr * dr - ci * di;
        dli = cr * di + ci * dr;
        temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        if (dlr - 1.0).abs() + dli.abs() < EPS {
            break;
        }
    }

    let gam = (p - f) / q;
    let mut jmu = (w / ((p - f) * gam + q)).sqrt();
    if isign < 0.0 {
        jmu = -jmu;
    }
    let ymu = jmu * gam;
    let ymu_prime = jmu * (gam * p + q);
    (jmu, -f * jmu, ymu, -ymu_prime)
}

fn hankel_jy01(x: f64) -> (f64, f64, f64, f64) {
    let (p0, q0) = hankel_pq(0.0, x);
    let (p1, q1) = hankel_pq(4.0, x);
    let (s, c) = x.sin_cos();
    let amp = (FRAC_2_PI / x).sqrt();
    let r = core::f64::consts::FRAC_1_SQRT_2;
    // omega_0 = x - pi/4, omega_1 = x - 3 pi/4
    let (c0, s0) = (r * (c + s), r * (s - c));
    let (c1, s1) = (r * (s - c), -r * (s + c));
    (
        amp * (p0 * c0 - q0 * s0),
        amp * (p1 * c1 - q1 * s1),
        amp * (p0 * s0 + q0 * c0),
        amp * (p1 * s1 + q1 * c1),
    )
}

/// Hankel's P and Q for `mu = 4 nu^2`.
fn hankel_pq(mu: f64, x: f64) -> (f64, f64) {
    let mut p = 1.0;
    let mut q = 0.0;
    let mut t = 1.0f64;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        t *= (mu - odd * odd) / (8.0 * kf * x);
        if t.abs() > last {
            break;
        }
        last = t.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * t;
        } else {
            q += sign * t;
        }
        if t.abs() < 1e-18 {
            break;
        }
    }
    (p, q)
}

fn steed_k0(x: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..MAXIT {
        a -= 2.0 * (i - 1) as f64;
        c = -a * c / i as f64;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            break;
        }
    }
    h *= a1;
    let k0 = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}
