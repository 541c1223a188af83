//! Structural invariants of the model families, checked over random parameters.

use msl_core::functionals::{evaluate_functionals, scale_invariance_check, FunctionalReport};
use msl_core::metric::{ricci_profile, scalar_curvature};
use msl_core::models::{
    make_cusp, make_schwarzschild, solve_cap_matching, CapVariant, CuspSpec, SchwarzschildForm, SchwarzschildSpec,
};
use msl_core::numeric::linspace;
use msl_core::surgery::{collapse_member, dehn_fill, CollapseBase, DehnFillSpec};
use msl_core::{Interval, Metric1D, RadialFn};
use proptest::prelude::*;

fn schwarzschild(m: f64, form: SchwarzschildForm) -> Metric1D {
    make_schwarzschild(&SchwarzschildSpec::new(m, form))
        .unwrap()
        .single()
        .unwrap()
        .clone()
}

fn conformal_annulus(m: f64, lo: f64, hi: f64) -> Metric1D {
    let spec = SchwarzschildSpec::new(m, SchwarzschildForm::ConformallyFlat);
    schwarzschild(m, SchwarzschildForm::ConformallyFlat)
        .restricted(Interval::new(spec.arclength_at_radius(lo * m), spec.arclength_at_radius(hi * m)).unwrap())
        .unwrap()
}

fn check_profile(g: &Metric1D, grid: &[f64]) -> Result<(), TestCaseError> {
    let p = ricci_profile(g, grid).unwrap();
    for k in 0..grid.len() {
        let s = p.scalar[k];
        let tol = 1e-12 * s.abs() + 1e-14;
        let trace: f64 = p.ricci[k].iter().sum();
        prop_assert!((trace - s).abs() <= tol, "trace {trace} vs s {s}");
        let z: f64 = p.ricci[k].iter().map(|l| (l - s / 3.0).powi(2)).sum();
        prop_assert!((z - p.z_norm_sq[k]).abs() <= 1e-12 * z.abs() + 1e-14);
        prop_assert!(p.z_norm_sq[k] >= 0.0);
    }
    Ok(())
}

fn check_report(f: &FunctionalReport) -> Result<(), TestCaseError> {
    for v in [
        f.volume,
        f.scalar_sq,
        f.scalar_minus_sq,
        f.s2,
        f.s2_minus,
        f.z2,
        f.i_eps,
    ] {
        prop_assert!(v >= 0.0);
    }
    prop_assert!(f.s2_minus <= f.s2 * (1.0 + 1e-12));
    prop_assert!(f.i_eps >= f.s2_minus);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn doubly_warped_profile_identities(
        a1 in 0.2f64..3.0, r1 in -1.5f64..1.5, c2 in 0.2f64..3.0, p2 in -2.0f64..2.0, a in 0.0f64..0.9,
    ) {
        let f1 = RadialFn::Exponential { scale: a1, rate: r1 };
        let f2 = RadialFn::Power { coeff: c2, offset: 1.0, exponent: p2 };
        let g = Metric1D::doubly_warped(f1, f2, a, Interval::new(0.1, 2.0).unwrap()).unwrap();
        check_profile(&g, &linspace(0.1, 2.0, 33))?;
    }

    #[test]
    fn spherical_profile_identities(radius in 0.5f64..5.0, m in 0.1f64..3.0) {
        let g = Metric1D::spherical(RadialFn::Sine { radius, phase: 0.0 }, Interval::new(0.1, 1.5 * radius).unwrap()).unwrap();
        check_profile(&g, &linspace(0.1, 1.5 * radius, 33))?;
        let s = conformal_annulus(m, 1.0, 50.0);
        check_profile(&s, &linspace(s.domain.lo, s.domain.hi, 33))?;
    }

    #[test]
    fn cusp_has_constant_curvature(d1 in 0.2f64..3.0, d2 in 0.2f64..3.0, a in 0.0f64..0.9, t0 in -2.0f64..5.0) {
        let g = make_cusp(&CuspSpec { d1, d2, cos_angle: a, t0 }).unwrap();
        let p = ricci_profile(&g, &linspace(t0, t0 + 5.0, 17)).unwrap();
        for r in p.ricci.iter().flatten() {
            prop_assert!((r + 2.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn schwarzschild_forms_have_expected_sign(m in 0.1f64..10.0) {
        let spec = SchwarzschildSpec::new(m, SchwarzschildForm::AreaRadius);
        let g = schwarzschild(m, SchwarzschildForm::AreaRadius);
        let grid = linspace(spec.arclength_at_radius(2.1 * m), spec.arclength_at_radius(100.0 * m), 65);
        for s in scalar_curvature(&g, &grid).unwrap() {
            prop_assert!(s.abs() * m * m <= 1e-8);
        }
        let c = conformal_annulus(m, 0.5, 100.0);
        for s in scalar_curvature(&c, &linspace(c.domain.lo, c.domain.hi, 65)).unwrap() {
            prop_assert!(s > 0.0);
        }
    }

    #[test]
    fn functional_orderings(m in 0.2f64..5.0, t0 in 2.0f64..8.0, a in 0.0f64..0.8, eps in 1e-4f64..1.0) {
        check_report(&evaluate_functionals(&conformal_annulus(m, 3.0, 30.0), eps).unwrap())?;
        let cusp = make_cusp(&CuspSpec { d1: 1.0, d2: 1.0, cos_angle: a, t0 }).unwrap()
            .restricted(Interval::new(t0, t0 + 4.0).unwrap()).unwrap();
        let f = evaluate_functionals(&cusp, eps).unwrap();
        check_report(&f)?;
        // s = -6 everywhere: S^2_- = S^2 and Z^2 = 0 give equality in both orderings
        prop_assert!((f.s2_minus / f.s2 - 1.0).abs() <= 1e-12);
        prop_assert!((f.i_eps / f.s2_minus - 1.0).abs() <= 1e-12);
        let fill = dehn_fill(&DehnFillSpec::new(CuspSpec { d1: 1.0, d2: 1.0, cos_angle: a, t0 })).unwrap();
        check_report(&evaluate_functionals(fill.torus(), eps).unwrap())?;
    }

    #[test]
    fn rescaling_invariance(m in 0.2f64..5.0, lambda in 0.1f64..10.0) {
        let inv = scale_invariance_check(&conformal_annulus(m, 3.0, 30.0), lambda, 1e-3).unwrap();
        for d in [inv.s2_deviation, inv.s2_minus_deviation, inv.i_eps_deviation, inv.z2_deviation, inv.volume_deviation] {
            prop_assert!(d <= 1e-10, "{inv:?}");
        }
    }

    #[test]
    fn dehn_fill_scales_and_glues(d1 in 0.3f64..3.0, d2 in 0.3f64..3.0, a in 0.0f64..0.9, t0 in 2.0f64..8.0) {
        let fill = dehn_fill(&DehnFillSpec::new(CuspSpec { d1, d2, cos_angle: a, t0 })).unwrap();
        prop_assert!((fill.c1 / (d1 * (-t0).exp()) - 1.0).abs() <= 1e-14);
        prop_assert!((fill.c2 / (d2 * (-t0).exp()) - 1.0).abs() <= 1e-14);
        let scale = fill.c1.max(fill.c2);
        for j in &fill.seam_jumps {
            prop_assert!(j.value.abs() <= 1e-10 * scale && j.first.abs() <= 1e-10 * scale);
        }
        prop_assert!(fill.volume_ratio() < 1.0);
    }

    #[test]
    fn cap_matches_conformal_sphere(r in 10.0f64..1e4, m in 0.1f64..2.0) {
        let c = solve_cap_matching(r, CapVariant::C1, m).unwrap();
        let rho = (r * r + 2.0 * m * r).sqrt();
        let h = (r + m) / (r + 2.0 * m) / rho;
        let th = c.delta * c.radius;
        prop_assert!((th.sin() / c.delta / rho - 1.0).abs() <= 1e-10);
        prop_assert!((c.delta * th.cos() / th.sin() / h - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn collapse_volume_scales_quadratically(eps in 1e-4f64..1.0, d1 in 0.5f64..2.0, a in 0.0f64..0.9) {
        let base = CollapseBase { d1, d2: 1.0, cos_angle: a };
        let one = collapse_member(&base, 1.0).unwrap();
        let e = collapse_member(&base, eps).unwrap();
        prop_assert!((e.volume / one.volume / (eps * eps) - 1.0).abs() <= 1e-10);
        prop_assert!(e.max_curvature == 0.0);
        prop_assert!(e.volume_radius <= one.volume_radius);
    }

    #[test]
    fn hermite_interpolates_and_is_c1(v in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 4)) {
        let knots = [0.0, 0.7, 1.5, 2.0];
        let data: Vec<Vec<f64>> = v.iter().map(|(a, b)| vec![*a, *b]).collect();
        let f = RadialFn::hermite(&knots, &data).unwrap();
        let h = 1e-7;
        for (k, d) in knots.iter().zip(&data) {
            let [value, slope] = f.derivs::<2>(*k);
            prop_assert!((value - d[0]).abs() <= 1e-12 && (slope - d[1]).abs() <= 1e-9);
            if *k > 0.0 && *k < 2.0 {
                let left = f.derivs::<2>(k - h);
                let right = f.derivs::<2>(k + h);
                prop_assert!((left[0] - right[0]).abs() <= 1e-5);
                prop_assert!((left[1] - right[1]).abs() <= 1e-4);
            }
        }
    }
}
