//! The cavity Green tensor computed along independent routes.

use cqed_core::green::*;
use cqed_core::quadrature::QuadSpec;
use cqed_core::special::j0;
use cqed_core::Error;
use num_complex::Complex64;
use std::f64::consts::PI;

fn close(a: Complex64, b: Complex64, rel: f64, abs: f64) -> bool {
    (a - b).norm() <= rel * b.norm() + abs
}

fn series_opts() -> SeriesOptions {
    SeriesOptions { m_max: 500, quad: QuadSpec::default().with_rel_tol(1e-9), ..SeriesOptions::default() }
}

#[test]
fn modesum_matches_reflection_series() {
    for kr in [0.2, 1.0, 2.0] {
        for kd in [2.0, 5.0, 20.0] {
            let g = CavityGeometry::new(kr, kd).unwrap();
            let ms = green_modesum(&g, 1.0, &ModeSumOptions::default()).unwrap();
            let s = green_reflection_series(&g, 1.0, &series_opts()).unwrap();
            assert!(s.m_used <= 500);
            for (a, b) in s.value.to_array().into_iter().zip(ms.to_array()) {
                assert!(close(a, b, 1e-5, 1e-8), "kr={kr} kd={kd}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn wrong_reflection_signs_are_detected() {
    let g = CavityGeometry::new(1.0, 5.0).unwrap();
    let ms = green_modesum(&g, 1.0, &ModeSumOptions::default()).unwrap();
    let opts = SeriesOptions { signs: ReflectionSigns::ALL_ALTERNATING, ..series_opts() };
    let s = green_reflection_series(&g, 1.0, &opts).unwrap();
    assert!(!close(s.value.zz, ms.zz, 1e-3, 0.0));
    assert_eq!(adjudicate_reflection_signs(&QuadSpec::default()).unwrap(), ReflectionSigns::ADJUDICATED);
}

#[test]
fn zero_reflections_is_free_space() {
    let g = CavityGeometry::new(0.7, 3.0).unwrap();
    let opts = SeriesOptions { m_max: 0, ..SeriesOptions::default() };
    let s = green_reflection_series(&g, 1.3, &opts).unwrap();
    assert_eq!(s.value, free_space_green(0.7, 1.3).unwrap());
}

#[test]
fn series_imaginary_part_vanishes_below_first_threshold() {
    let g = CavityGeometry::new(1.0, 2.0).unwrap();
    let at = |m| {
        let opts = SeriesOptions { m_max: m, truncation: Truncation::Fixed, ..series_opts() };
        let v = green_reflection_series(&g, 1.0, &opts).unwrap().value;
        v.par.im.abs().max(v.perp.im.abs())
    };
    let (a, b, c) = (at(10), at(100), at(400));
    assert!(b < a && c < b, "{a} {b} {c}");
    let v = green_reflection_series(&g, 1.0, &series_opts()).unwrap().value;
    assert!(v.par.im.abs() < 1e-8 && v.perp.im.abs() < 1e-8);
}

/// `1/sin x = -2i sum_{m>=0} e^{i(2m+1)x}` for `Im x > 0`, the expansion that
/// turns the mode sums into a sum over reflections.
#[test]
fn inverse_sine_expansion() {
    for x in [Complex64::new(1.0, 0.3), Complex64::new(2.5, 0.05), Complex64::new(-0.7, 1.0)] {
        let i = Complex64::i();
        let sum: Complex64 = (0..20_000).map(|m| (i * x * (2 * m + 1) as f64).exp()).sum();
        let lhs = 1.0 / x.sin();
        assert!((lhs - (-2.0 * i * sum)).norm() < 1e-10 * lhs.norm(), "x={x}");
    }
}

#[test]
fn kramers_kronig_reproduces_real_part() {
    let quad = QuadSpec { rel_tol: 1e-8, abs_tol: 1e-12, ..QuadSpec::default() };
    for (kr, kd) in [(1.0, 5.0), (0.5, 2.0)] {
        let g = CavityGeometry::new(kr, kd).unwrap();
        let want = re_green_modesum(&g, 1.0, &ModeSumOptions::default()).unwrap();
        let kk = kramers_kronig_re(&g, 1.0, &quad).unwrap();
        for (a, b) in kk.to_array().into_iter().zip(want.to_array()) {
            assert!((a - b).abs() <= 1e-4 * b.abs(), "kr={kr} kd={kd}: {a} vs {b}");
        }
    }
}

#[test]
fn kramers_kronig_discrepancy_shrinks_with_tolerance() {
    let g = CavityGeometry::new(1.0, 5.0).unwrap();
    let want = re_green_modesum(&g, 1.0, &ModeSumOptions::default()).unwrap();
    let err = |rel| {
        let quad = QuadSpec { rel_tol: rel, abs_tol: 1e-14, ..QuadSpec::default() };
        let kk = kramers_kronig_re(&g, 1.0, &quad).unwrap();
        (kk - want).to_array().into_iter().fold(0.0f64, |m, x| m.max(x.abs()))
    };
    let (coarse, fine) = (err(1e-6), err(5e-7));
    assert!(fine <= coarse * 1.01 + 1e-12, "{coarse} -> {fine}");
}

#[test]
fn im_zz_below_first_threshold() {
    let g = CavityGeometry::new(1.0, 2.0).unwrap();
    let im = im_green_modesum(&g, 1.0, &ModeSumOptions::default()).unwrap();
    assert_eq!((im.par, im.perp), (0.0, 0.0));
    assert!((im.zz + j0(1.0) / 8.0).abs() < 1e-15);
}

#[test]
fn guard_band_rejects_thresholds() {
    let g = CavityGeometry::new(1.0, PI).unwrap();
    let err = green_modesum(&g, 2.0 + 1e-9, &ModeSumOptions::default()).unwrap_err();
    assert!(matches!(err, Error::Threshold { nearest: 2, .. }), "{err:?}");
    let wide = ModeSumOptions { guard: ThresholdGuard { width: 0.1 }, ..ModeSumOptions::default() };
    assert!(green_modesum(&g, 2.05, &wide).is_err());
    assert!(green_modesum(&g, 2.05, &ModeSumOptions::default()).is_ok());
}

/// Textbook dipole field, `G = -e^{ikR}/(4 pi R) [(1 + i/kR - 1/(kR)^2) I + (3/(kR)^2 - 3i/kR - 1) R R]`.
fn textbook(r: f64, k: Complex64) -> CartesianGreen<Complex64> {
    let i = Complex64::i();
    let kr = k * r;
    let a = 1.0 + i / kr - 1.0 / (kr * kr);
    let b = 3.0 / (kr * kr) - 3.0 * i / kr - 1.0;
    let pref = -(i * kr).exp() / (4.0 * PI * r);
    CartesianGreen { par: pref * (a + b), perp: pref * a, zz: pref * a }
}

#[test]
fn free_space_matches_textbook_field() {
    for (r, k) in [(1.0, 1.0), (0.3, 2.0), (5.0, 0.7)] {
        let g = free_space_green(r, k).unwrap();
        for (a, b) in g.to_array().into_iter().zip(textbook(r, k.into()).to_array()) {
            assert!(close(a, b, 1e-13, 0.0), "{a} vs {b}");
        }
        assert_eq!(g.perp, g.zz);
        let u = free_space_green_imag(r, k).unwrap();
        for (a, b) in u.to_array().into_iter().zip(textbook(r, Complex64::new(0.0, k)).to_array()) {
            assert!(close(a.into(), b, 1e-13, 0.0), "{a} vs {b}");
        }
    }
}

#[test]
fn far_field_powers() {
    // |G_par| r^2 and |G_perp| r tend to constants.
    let k = 1.0;
    let (a, b) = (free_space_green(1e3, k).unwrap(), free_space_green(2e3, k).unwrap());
    assert!((a.par.norm() / b.par.norm() - 4.0).abs() < 1e-2);
    assert!((a.perp.norm() / b.perp.norm() - 2.0).abs() < 1e-5);
}

#[test]
fn cavity_tends_to_free_space_for_wide_plates() {
    let g = CavityGeometry::new(1.0, 200.0).unwrap();
    let cav = green_modesum(&g, 1.0, &ModeSumOptions::default()).unwrap();
    let free = free_space_green(1.0, 1.0).unwrap();
    for (a, b) in cav.to_array().into_iter().zip(free.to_array()) {
        assert!(close(a, b, 1e-2, 0.0), "{a} vs {b}");
    }
}

/// Image dipoles at `z = m d` with sign `(-1)^m` for components parallel to
/// the plates and `+1` for the normal one; converges geometrically at
/// imaginary wavenumber.
fn image_sum(r: f64, d: f64, u: f64) -> CartesianGreen<f64> {
    let k = Complex64::new(0.0, u);
    let mut acc = CartesianGreen { par: 0.0, perp: 0.0, zz: 0.0 };
    let m_max = (40.0 / (u * d)).ceil() as i64 + 2;
    for m in -m_max..=m_max {
        let z = m as f64 * d;
        let big_r = (r * r + z * z).sqrt();
        let kr = k * big_r;
        let i = Complex64::i();
        let a = 1.0 + i / kr - 1.0 / (kr * kr);
        let b = 3.0 / (kr * kr) - 3.0 * i / kr - 1.0;
        let pref = -(i * kr).exp() / (4.0 * PI * big_r);
        let s = if m % 2 == 0 { 1.0 } else { -1.0 };
        acc.par += s * (pref * (a + b * (r / big_r).powi(2))).re;
        acc.perp += s * (pref * a).re;
        acc.zz += (pref * (a + b * (z / big_r).powi(2))).re;
    }
    acc
}

#[test]
fn imaginary_frequency_matches_q_integral() {
    let quad = QuadSpec { rel_tol: 1e-11, abs_tol: 1e-300, ..QuadSpec::default() };
    for ur in [0.5, 2.0] {
        for ud in [2.0, 10.0] {
            let g = CavityGeometry::new(ur, ud).unwrap();
            let want = greens_q_integral_oracle(&g, 1.0, &quad).unwrap();
            let got = green_imaginary_freq(&g, 1.0).unwrap();
            for (a, b) in got.to_array().into_iter().zip(want.to_array()) {
                assert!((a - b).abs() <= 1e-7 * b.abs(), "ur={ur} ud={ud}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn imaginary_frequency_matches_image_sum() {
    let quad = QuadSpec { rel_tol: 1e-11, abs_tol: 1e-300, ..QuadSpec::default() };
    for (r, d, u) in [(0.5, 2.0, 1.0), (2.0, 10.0, 1.0), (0.01, 1.0, 3.0), (1.5, 1.0, 0.4), (0.1, 1.0, 0.05)] {
        let g = CavityGeometry::new(r, d).unwrap();
        let want = image_sum(r, d, u);
        for method in [ImagFreqMethod::ZetaIntegral, ImagFreqMethod::ModeSum] {
            let got = green_imaginary_freq_with(&g, u, method, &quad).unwrap();
            for (a, b) in got.to_array().into_iter().zip(want.to_array()) {
                assert!((a - b).abs() <= 1e-8 * b.abs(), "{method:?} r={r} d={d} u={u}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn imaginary_frequency_limits() {
    // Exponential suppression at ur = 30.
    let g = CavityGeometry::new(1.0, 3.0).unwrap();
    let v = green_imaginary_freq(&g, 30.0).unwrap();
    assert!(v.to_array().iter().all(|x| x.abs() < (-25.0f64).exp()), "{v:?}");
    // Wide plates: only the free-space term is left.
    let g = CavityGeometry::new(1.0, 100.0).unwrap();
    let v = green_imaginary_freq(&g, 1.0).unwrap();
    let free = free_space_green_imag(1.0, 1.0).unwrap();
    for (a, b) in v.to_array().into_iter().zip(free.to_array()) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
}

#[test]
fn derivative_routes_agree() {
    let opts = ModeSumOptions::default();
    let points = [
        (1.0, 5.0),
        (2.0, 20.0),
        (0.2, 2.0),
        (0.5, 7.5),
        (1.5, 3.7),
        (3.0, 11.0),
        (0.1, 0.8),
        (0.7, 14.2),
        (2.5, 4.4),
        (1.2, 9.0),
    ];
    for (kr, kd) in points {
        let g = CavityGeometry::new(kr, kd).unwrap();
        let c = d_dk_k2_re_green(&g, 1.0, &opts).unwrap();
        assert!(c.rel_diff < 1e-6, "kr={kr} kd={kd}: {}", c.rel_diff);
    }
    let free = d_dk_k2_re_free(1.3, 1.0).unwrap();
    assert!(free.rel_diff < 1e-8, "{}", free.rel_diff);
    assert_eq!(free.analytic.perp, free.analytic.zz);
}
