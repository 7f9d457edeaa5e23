use magspec::bounds::{ekp_rhs, BoundReport, Context, Relation, Verdict};
use magspec::fem::{BoundaryCondition, GradientGauge, Source, VectorPotential};
use magspec::geometry::{presets, summarize};
use magspec::mesh::triangulate;
use magspec::spectrum::solve_spectrum;
use magspec::torsion::{hole_calculus, lattice_minimized_s};
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn summary_scales_with_the_domain(a in 1.0f64..3.0, t in 0.3f64..3.0) {
        let d = presets::ellipse(a, 1.0 / a);
        let s = summarize(&d, 512).unwrap();
        let st = summarize(&d.scaled(t), 512).unwrap();
        prop_assert!((st.area / (t * t * s.area) - 1.0).abs() < 1e-10);
        prop_assert!((st.perimeter / (t * s.perimeter) - 1.0).abs() < 1e-10);
        prop_assert!((st.kappa_max * t / s.kappa_max - 1.0).abs() < 1e-8);
        prop_assert!((st.r_omega / (t * s.r_omega) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn isoperimetric_inequality(k in 2usize..7, eps in 0.01f64..0.25) {
        let d = presets::lobed(k, eps).unwrap();
        let s = summarize(&d, 1024).unwrap();
        prop_assert!(s.perimeter * s.perimeter > 4.0 * PI * s.area);
        prop_assert!(s.kappa_max * s.area.sqrt() >= PI.sqrt());
    }

    #[test]
    fn ekp_rhs_is_nonnegative_and_below_weak_cap(b in 1e-3f64..50.0, r_in in 0.2f64..1.0, l2 in 0.5f64..20.0) {
        let a = PI;
        let v = ekp_rhs(b, a, r_in, l2);
        prop_assert!(v >= 0.0);
        prop_assert!(v <= PI * b * b * r_in.powi(4) / (24.0 * a) + 1e-15);
    }

    #[test]
    fn slack_sign_matches_relation(lhs in -10.0f64..10.0, rhs in -10.0f64..10.0, tol in 0.0f64..1.0) {
        let ctx = Context { domain: "p".into(), b: None, mesh_h: 0.1 };
        let le = BoundReport::new("p", ctx.clone(), Relation::Le, lhs, rhs, tol, false, ("l", "r"));
        let ge = BoundReport::new("p", ctx, Relation::Ge, lhs, rhs, tol, false, ("l", "r"));
        prop_assert_eq!(le.slack, -ge.slack);
        prop_assert_eq!(le.verdict == Verdict::Holds, rhs - lhs >= -tol);
        prop_assert_eq!(ge.verdict == Verdict::Holds, lhs - rhs >= -tol);
    }
}

fn annulus_calculus() -> &'static magspec::torsion::HoleCalculus {
    static HC: OnceLock<magspec::torsion::HoleCalculus> = OnceLock::new();
    HC.get_or_init(|| hole_calculus(&presets::annulus(0.4, Some(1.0)), &Source::Constant(1.0), 0.08).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn lattice_minimum_is_periodic(phi in -20.0f64..20.0, k in -4i64..5) {
        let hc = annulus_calculus();
        let (a, _) = lattice_minimized_s(hc, &[phi]).unwrap();
        let (b, _) = lattice_minimized_s(hc, &[phi + 2.0 * PI * k as f64]).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        prop_assert!(a >= hc.s_base * (1.0 - 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn eigenvalues_are_invariant_under_linear_gauges(c1 in -2.0f64..2.0, c2 in -2.0f64..2.0, b in 0.5f64..10.0) {
        let mesh = Arc::new(triangulate(&presets::ellipse(1.5, 1.0 / 1.5), 0.15).unwrap());
        let g = GradientGauge { terms: vec![(c1, 1, 0), (c2, 0, 1), (0.7, 0, 0)] };
        for bc in [BoundaryCondition::Neumann, BoundaryCondition::Dirichlet] {
            let base = solve_spectrum(&mesh, &VectorPotential::Symmetric, b, bc, 2, 1e-9).unwrap();
            let gauged = solve_spectrum(&mesh, &VectorPotential::Symmetric.with_gauge(g.clone()), b, bc, 2, 1e-9).unwrap();
            for (x, y) in base.eigenvalues.iter().zip(&gauged.eigenvalues) {
                prop_assert!((x - y).abs() < 1e-7 * x.abs().max(1.0), "{} vs {}", x, y);
            }
        }
    }

    #[test]
    fn translation_only_changes_the_gauge(dx in -2.0f64..2.0, dy in -2.0f64..2.0) {
        let d = presets::ellipse(1.5, 1.0 / 1.5);
        let moved = d.transformed(1.0, 0.0, [dx, dy]);
        let m0 = Arc::new(triangulate(&d, 0.12).unwrap());
        let m1 = Arc::new(triangulate(&moved, 0.12).unwrap());
        let l0 = solve_spectrum(&m0, &VectorPotential::Symmetric, 3.0, BoundaryCondition::Neumann, 1, 1e-9).unwrap().lambda1();
        let l1 = solve_spectrum(&m1, &VectorPotential::Symmetric, 3.0, BoundaryCondition::Neumann, 1, 1e-9).unwrap().lambda1();
        prop_assert!((l0 - l1).abs() < 2e-3 * l0, "{} vs {}", l0, l1);
    }
}

#[test]
fn nonlinear_gauge_discrepancy_vanishes_under_refinement() {
    let d = presets::ellipse(1.5, 1.0 / 1.5);
    let g = GradientGauge { terms: vec![(0.5, 2, 1), (0.3, 0, 3)] };
    let gap = |h: f64| {
        let mesh = Arc::new(triangulate(&d, h).unwrap());
        let a = solve_spectrum(&mesh, &VectorPotential::Symmetric, 2.0, BoundaryCondition::Neumann, 1, 1e-9).unwrap().lambda1();
        let b = solve_spectrum(&mesh, &VectorPotential::Symmetric.with_gauge(g.clone()), 2.0, BoundaryCondition::Neumann, 1, 1e-9).unwrap().lambda1();
        (a - b).abs()
    };
    let (g1, g2) = (gap(0.16), gap(0.04));
    assert!(g2 < g1 / 6.0, "{g1} {g2}");
}
