//! Randomized invariants.

use cqed_core::atoms::*;
use cqed_core::electrostatic::*;
use cqed_core::green::*;
use cqed_core::quadrature::{QuadSpec, SeriesSpec};
use cqed_core::vdw::*;
use cqed_core::Error;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| Complex64::new(a, b))
}

fn cvec() -> impl Strategy<Value = [Complex64; 3]> {
    [complex(), complex(), complex()]
}

/// `J0(x) = (1/pi) int_0^pi cos(x sin t) dt`; the trapezoid rule is exact to
/// rounding for this periodic integrand once the step resolves it.
fn j0_trapezoid(x: f64) -> f64 {
    let n = 64 + 4 * x.abs().ceil() as usize;
    let h = PI / n as f64;
    let s: f64 = (0..n).map(|m| (x * (m as f64 * h).sin()).cos()).sum();
    s / n as f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn spherical_round_trip(p in complex(), q in complex(), z in complex()) {
        let g = CartesianGreen { par: p, perp: q, zz: z };
        let back = from_spherical(to_spherical(g));
        for (a, b) in back.to_array().into_iter().zip(g.to_array()) {
            prop_assert!((a - b).norm() <= 1e-15);
        }
    }

    #[test]
    fn contraction_is_the_cartesian_bilinear_form(a in cvec(), b in cvec(), g in [complex(), complex(), complex()]) {
        let (da, db) = (SphericalDipole::from_cartesian(a[0], a[1], a[2]), SphericalDipole::from_cartesian(b[0], b[1], b[2]));
        let cart = CartesianGreen { par: g[0], perp: g[1], zz: g[2] };
        let want = a[0] * b[0] * g[0] + a[1] * b[1] * g[1] + a[2] * b[2] * g[2];
        prop_assert!((da.contract(&to_spherical(cart), &db) - want).norm() <= 1e-14);
        // The partner is the componentwise conjugate.
        let p = da.hermitian_partner();
        let conj = SphericalDipole::from_cartesian(a[0].conj(), a[1].conj(), a[2].conj());
        prop_assert!((p.zero - conj.zero).norm() + (p.plus - conj.plus).norm() + (p.minus - conj.minus).norm() <= 1e-15);
        prop_assert_eq!(p.hermitian_partner(), da);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn modesum_scales_with_length(kr in 0.05..5.0f64, kd in 0.5..30.0f64, len in 0.01..100.0f64) {
        let opts = ModeSumOptions::default();
        let a = green_modesum(&CavityGeometry::new(kr, kd).unwrap(), 1.0, &opts);
        let b = green_modesum(&CavityGeometry::new(kr * len, kd * len).unwrap(), 1.0 / len, &opts);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                for (x, y) in a.to_array().into_iter().zip(b.to_array()) {
                    prop_assert!((x - y * len).norm() <= 1e-10 * x.norm().max(1e-8));
                }
            }
            (Err(Error::Threshold { .. }), _) | (_, Err(Error::Threshold { .. })) => {}
            (a, b) => prop_assert!(false, "{a:?} {b:?}"),
        }
    }

    #[test]
    fn below_first_threshold(kr in 0.01..10.0f64, frac in 0.001..0.999f64) {
        let kd = frac * PI;
        let g = im_green_modesum(&CavityGeometry::new(kr, kd).unwrap(), 1.0, &ModeSumOptions::default()).unwrap();
        prop_assert_eq!(g.par, 0.0);
        prop_assert_eq!(g.perp, 0.0);
        let want = -j0_trapezoid(kr) / (4.0 * kd);
        prop_assert!((g.zz - want).abs() <= 1e-12 * want.abs().max(1e-3));
    }

    #[test]
    fn resonant_envelope(kr in 0.05..20.0f64, kd in 0.2..40.0f64) {
        match v_res_dimensionless(&CavityGeometry::new(kr, kd).unwrap(), 1.0, &ModeSumOptions::default()) {
            Ok((va, vb)) => {
                for (a, b) in va.to_array().into_iter().zip(vb.to_array()) {
                    prop_assert!(b >= a.abs());
                }
            }
            Err(e) => {
                let threshold = matches!(e, Error::Threshold { .. });
                prop_assert!(threshold, "{:?}", e);
            }
        }
    }

    #[test]
    fn static_components_depend_on_ratio(x in 0.006..4.0f64, len in 0.1..10.0f64) {
        let spec = SeriesSpec::default();
        let a = v_static_dimensionless(&CavityGeometry::new(x, 1.0).unwrap(), &spec).unwrap();
        let b = v_static_dimensionless(&CavityGeometry::new(x * len, len).unwrap(), &spec).unwrap();
        for (p, q) in [(a.v00, b.v00), (a.vpp, b.vpp), (a.vpm, b.vpm)] {
            prop_assert!((p - q).abs() <= 1e-12 * p.abs());
        }
        prop_assert!(a.v00 > 0.0 && a.vpp < 0.0 && a.vpm < 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn imaginary_routes_agree(ur in 0.05..5.0f64, ratio in 0.02..1.5f64) {
        let g = CavityGeometry::new(ur, ur / ratio).unwrap();
        let q = QuadSpec { rel_tol: 1e-11, abs_tol: 1e-300, ..QuadSpec::default() };
        let a = green_imaginary_freq_with(&g, 1.0, ImagFreqMethod::ZetaIntegral, &q).unwrap();
        let b = green_imaginary_freq_with(&g, 1.0, ImagFreqMethod::ModeSum, &q).unwrap();
        let scale = a.par.abs().max(a.perp.abs());
        for (x, y) in a.to_array().into_iter().zip(b.to_array()) {
            prop_assert!((x - y).abs() <= 1e-8 * scale, "{x} vs {y}");
        }
    }

    #[test]
    fn off_resonant_energies_coincide(
        wa in 0.5..2.0f64,
        wb in 0.5..2.0f64,
        da in cvec(),
        db in cvec(),
        r in 0.05..3.0f64,
        excited in 0..2u32,
    ) {
        let w0 = 2.0 * PI * 384.23e12;
        let atom = |label: &str, w: f64, d: [Complex64; 3]| {
            let d = d.map(|x| x * 2e-29);
            AtomSpec::new(label, vec![Level { index: 0, omega: 0.0 }, Level { index: 1, omega: w * w0 }])
                .with_transition(0, 1, SphericalDipole::from_cartesian(d[0], d[1], d[2]))
        };
        let cfg = TwoAtomConfig {
            atom_a: atom("A", wa, da),
            atom_b: atom("B", wb, db),
            state_a: excited,
            state_b: 0,
            geometry: CavityGeometry::new(r * 1e-6, 1.0).unwrap(),
        };
        let opts = VdwOptions { model: GreenModel::FreeSpace, ..VdwOptions::default() };
        let w = w_off_full(&cfg, &opts).unwrap();
        prop_assert!(w.w_a == w.w_b && w.w_b == w.phase_shift);
        if excited == 0 {
            prop_assert!(w.w_a <= 0.0);
        }
    }
}
