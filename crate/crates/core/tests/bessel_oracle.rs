//! Bessel functions against a 40-digit reference table and quadrature oracles.

use cqed_core::special::*;
use proptest::prelude::*;
use std::f64::consts::{FRAC_2_PI, PI};

const TABLE: &str = include_str!("data/bessel_oracle.csv");

fn rows() -> Vec<[f64; 8]> {
    TABLE
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
            [v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]]
        })
        .collect()
}

/// Relative 1e-12, with a 1e-14 absolute allowance scaled by the oscillation
/// envelope so that values near zeros are judged absolutely.
fn close_oscillatory(got: f64, want: f64, x: f64) -> bool {
    let env = if x < 1.0 { 1.0 } else { (FRAC_2_PI / x).sqrt() };
    (got - want).abs() <= 1e-12 * want.abs() + 1e-14 * env
}

#[test]
fn table_j_and_y() {
    let mut worst = [0.0f64; 5];
    for r in rows() {
        let x = r[0];
        let got = [j0(x), j1(x), j2(x), y0(x), y1(x)];
        for i in 0..5 {
            let want = r[i + 1];
            assert!(
                close_oscillatory(got[i], want, x),
                "function {i} at x = {x}: got {}, want {want}",
                got[i]
            );
            let env = if x < 1.0 { 1.0 } else { (FRAC_2_PI / x).sqrt() };
            worst[i] = worst[i].max((got[i] - want).abs() / (want.abs() + env));
        }
    }
    println!("worst scaled errors J0 J1 J2 Y0 Y1: {worst:?}");
}

#[test]
fn table_k() {
    for r in rows() {
        let x = r[0];
        if x > 700.0 {
            continue;
        }
        let (a, b) = k01(x);
        assert!((a - r[6]).abs() <= 1e-12 * r[6], "K0({x}) = {a}, want {}", r[6]);
        assert!((b - r[7]).abs() <= 1e-12 * r[7], "K1({x}) = {b}, want {}", r[7]);
    }
}

/// J_n(x) = (1/2pi) int_0^{2pi} cos(n t - x sin t) dt; the trapezoid rule is
/// spectrally accurate for this periodic integrand.
fn j_trapezoid(n: f64, x: f64) -> f64 {
    let m = 2 * (x as usize + 64);
    let h = 2.0 * PI / m as f64;
    (0..m).map(|i| {
        let t = i as f64 * h;
        (n * t - x * t.sin()).cos()
    }).sum::<f64>()
        / m as f64
}

/// K_n(x) = int_0^inf exp(-x cosh t) cosh(n t) dt, trapezoid on a fine grid.
fn k_trapezoid(n: f64, x: f64) -> f64 {
    let h = 0.01;
    let mut s = 0.5 * (-x).exp();
    let mut i = 1;
    loop {
        let t = i as f64 * h;
        let v = (-x * t.cosh()).exp() * (n * t).cosh();
        s += v;
        if v < 1e-300 || x * t.cosh() > 745.0 {
            break;
        }
        i += 1;
    }
    s * h
}

#[test]
fn j_against_trapezoid() {
    for i in 0..200 {
        let x = 0.05 + 0.37 * i as f64;
        for (n, f) in [(0.0, j0 as fn(f64) -> f64), (1.0, j1), (2.0, j2)] {
            let want = j_trapezoid(n, x);
            assert!((f(x) - want).abs() < 5e-15, "J{n}({x})");
        }
    }
}

#[test]
fn k_against_trapezoid() {
    for i in 0..100 {
        let x = 0.01 * 1.08f64.powi(i);
        for (n, f) in [(0.0, k0 as fn(f64) -> f64), (1.0, k1)] {
            let want = k_trapezoid(n, x);
            assert!((f(x) - want).abs() < 1e-12 * want, "K{n}({x}) {} {}", f(x), want);
        }
    }
}

#[test]
fn k0_asymptotic_at_20() {
    // sqrt(pi/2x) e^-x (1 - 1/(8x) + 9/(2 (8x)^2) - ...)
    let x = 20.0f64;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..30 {
        let kf = k as f64;
        term *= -((2.0 * kf - 1.0).powi(2)) / (kf * 8.0 * x);
        sum += term;
    }
    let want = (PI / (2.0 * x)).sqrt() * (-x).exp() * sum;
    assert!((k0(x) - want).abs() < 1e-8 * want);
}

#[test]
fn k1_is_minus_k0_derivative() {
    let h = 1e-4;
    let x = 1.0;
    let fd = (k0(x + h) - k0(x - h)) / (2.0 * h);
    assert!((fd + k1(x)).abs() < 1e-8);
}

#[test]
fn wronskians_on_log_grid() {
    for i in 0..=120 {
        let x = 1e-3 * 10f64.powf(i as f64 / 20.0);
        let (j0, j1, y0, y1) = jy01(x);
        let w = j1 * y0 - j0 * y1;
        let want = 2.0 / (PI * x);
        assert!((w - want).abs() <= 1e-12 * want, "JY Wronskian at {x}: {w} vs {want}");
        if x < 600.0 {
            // I0 K1 + I1 K0 = 1/x is not available without I; use K1 = -K0' instead
            let h = 1e-4 * x.min(1.0);
            let fd = (k0(x + h) - k0(x - h)) / (2.0 * h);
            assert!((fd + k1(x)).abs() <= 1e-7 * k1(x), "K recurrence at {x}");
        }
    }
}

#[test]
fn k0_strictly_decreasing() {
    let mut prev = f64::INFINITY;
    for i in 0..500 {
        let x = 1e-3 + 0.1 * i as f64;
        let v = k0(x);
        assert!(v > 0.0 && v < prev);
        prev = v;
    }
}

proptest! {
    #[test]
    fn recurrence_j2(x in 0.1f64..1000.0) {
        let lhs = j2(x);
        let rhs = 2.0 * j1(x) / x - j0(x);
        let env = (FRAC_2_PI / x.max(1.0)).sqrt();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs() + 1e-14 * env);
    }

    #[test]
    fn k_positive_and_ordered(x in 1e-3f64..700.0) {
        let (a, b) = k01(x);
        prop_assert!(a > 0.0 && b > a);
    }

    #[test]
    fn wronskian_random(x in 1e-3f64..1e3) {
        let (j0, j1, y0, y1) = jy01(x);
        let want = 2.0 / (PI * x);
        prop_assert!((j1 * y0 - j0 * y1 - want).abs() <= 1e-12 * want);
    }
}
