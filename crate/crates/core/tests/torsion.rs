use magspec::fem::{integrate, FieldRef, Integrand, ScalarField, Source};
use magspec::geometry::presets;
use magspec::mesh::triangulate;
use magspec::torsion::*;
use std::f64::consts::PI;
use std::sync::Arc;

#[test]
fn disc_torsion_converges_at_second_order() {
    let disc = presets::disc(1.0);
    let mut errs = Vec::new();
    for h in [0.1, 0.05, 0.025] {
        let r = torsion_solve(&disc, &Source::Constant(1.0), h).unwrap();
        assert!(r.formula_gap < 1e-10 * r.s_omega);
        assert!((r.psi_min + 0.25).abs() < 0.5 * h * h);
        errs.push(((r.s_omega - PI / 8.0).abs(), h));
    }
    let rate = (errs[0].0 / errs[2].0).ln() / (errs[0].1 / errs[2].1).ln();
    assert!(rate > 1.8, "rate {rate}, {errs:?}");
}

#[test]
fn ellipse_minimum_and_rigidity() {
    let (a, b) = (2.0, 0.5);
    let r = torsion_solve(&presets::ellipse(a, b), &Source::Constant(1.0), 0.03).unwrap();
    let want = 2.0 / (0.25 + 4.0) * PI / 8.0;
    assert!((r.s_omega - want).abs() < 1e-2 * want, "{}", r.s_omega);
    let psi_min = -1.0 / (2.0 / (a * a) + 2.0 / (b * b));
    assert!((r.psi_min - psi_min).abs() < 1e-2 * psi_min.abs());
}

#[test]
fn stream_potential_of_the_disc() {
    let r = torsion_solve(&presets::disc(1.0), &Source::Constant(1.0), 0.05).unwrap();
    let magspec::fem::VectorPotential::Stream(sp) = stream_potential(&r) else { panic!() };
    let mesh = &r.psi.mesh;
    let mut worst: f64 = 0.0;
    let mut energy = 0.0;
    for (t, a) in sp.per_triangle.iter().enumerate() {
        let c = magspec::fem::Element::new(mesh, t).centroid();
        worst = worst.max((a[0] + 0.5 * c[1]).hypot(a[1] - 0.5 * c[0]));
        energy += mesh.triangle_area(t) * (a[0] * a[0] + a[1] * a[1]);
    }
    assert!(worst < 0.1, "{worst}");
    assert!((energy - r.energy).abs() < 1e-12 * energy);
}

#[test]
fn stream_potential_boundary_tangency_improves() {
    let ell = presets::ellipse(2.0, 0.5);
    let d: Vec<f64> = [0.08, 0.04]
        .iter()
        .map(|&h| {
            let r = torsion_solve(&ell, &Source::Constant(1.0), h).unwrap();
            let magspec::fem::VectorPotential::Stream(sp) = stream_potential(&r) else { panic!() };
            boundary_normal_defect(&sp)
        })
        .collect();
    assert!(d[1] < 0.75 * d[0], "{d:?}");
}

#[test]
fn symmetrization_of_constants_and_half_indicator() {
    let disc = presets::with_area(&presets::disc(1.0), 1.0).unwrap();
    let r = (1.0 / PI).sqrt();
    let mesh = Arc::new(triangulate(&disc, 0.02).unwrap());
    let one = ScalarField::constant(mesh.clone(), 1.0);
    let p = schwarz_symmetrize(&one, r).unwrap();
    assert!(p.values.iter().all(|v| (*v - 1.0).abs() < 1e-14));

    // half of the disc by area: the left half-plane
    let half = ScalarField::from_fn(mesh.clone(), |x| if x[0] < 0.0 { 1.0 } else { 0.0 }).unwrap();
    let p = schwarz_symmetrize(&half, r).unwrap();
    assert!(p.is_nonincreasing());
    let inner = (0.5f64 / PI).sqrt();
    for (&rr, &v) in p.radii.iter().zip(&p.values) {
        if rr < 0.95 * inner {
            assert_eq!(v, 1.0);
        } else if rr > 1.05 * inner {
            assert_eq!(v, 0.0);
        }
    }
    let mass = integrate(FieldRef::Real(&half), Integrand::Value);
    assert!((p.mass() - mass).abs() < 1e-3 * mass);
}

#[test]
fn symmetrized_distribution_matches() {
    let dom = presets::ellipse(2.0, 0.5);
    let mesh = Arc::new(triangulate(&dom, 0.03).unwrap());
    let beta = ScalarField::from_fn(mesh.clone(), |x| (-(x[0] * x[0] + 4.0 * x[1] * x[1])).exp() * (1.0 + 0.5 * x[0])).unwrap();
    let p = schwarz_symmetrize(&beta, 1.0).unwrap();
    assert!(p.is_nonincreasing());
    let area = mesh.total_area();
    for t in [0.2, 0.5, 0.9] {
        let lhs = distribution_function(&beta, t) * PI / area;
        let rhs: f64 = p.radii.iter().zip(&p.values).filter(|(_, v)| **v > t).map(|(r, _)| *r).fold(0.0, f64::max);
        assert!((lhs - PI * rhs * rhs).abs() < 5e-3, "t={t}: {lhs} vs {}", PI * rhs * rhs);
    }
}

#[test]
fn annulus_hole_calculus_matches_closed_form() {
    let (r1, r2) = (0.5, 1.25f64.sqrt());
    let hc = hole_calculus(&presets::annulus(r1, Some(r2)), &Source::Constant(1.0), 0.03).unwrap();
    let l = (r2 / r1).ln();
    let m11 = 2.0 * PI / l;
    assert!((hc.m_matrix[0][0] - m11).abs() < 1e-2 * m11);
    let phi0 = -2.0 * PI / l * (r2 * r2 / 4.0 - r1 * r1 / 4.0 - r1 * r1 * l / 2.0);
    assert!((hc.phi0[0] - phi0).abs() < 1e-2 * phi0.abs());
    assert!((hc.phi0_circulation[0] - phi0).abs() < 0.1 * phi0.abs());
    for (p, &v) in hc.theta[0].mesh.vertices.iter().zip(&hc.theta[0].values) {
        assert!((-1e-8..=1.0 + 1e-8).contains(&v));
        let r = p[0].hypot(p[1]);
        assert!((v - (r2 / r).ln() / l).abs() < 1e-2);
    }
}

#[test]
fn circulation_is_first_order() {
    let (r1, r2) = (0.5, 1.25f64.sqrt());
    let l = (r2 / r1).ln();
    let phi0 = -2.0 * PI / l * (r2 * r2 / 4.0 - r1 * r1 / 4.0 - r1 * r1 * l / 2.0);
    let e: Vec<f64> = [0.06, 0.03]
        .iter()
        .map(|&h| {
            let hc = hole_calculus(&presets::annulus(r1, Some(r2)), &Source::Constant(1.0), h).unwrap();
            (hc.phi0_circulation[0] - phi0).abs()
        })
        .collect();
    assert!(e[0] / e[1] > 1.6, "{e:?}");
}

#[test]
fn flux_relation_and_convention() {
    let hc = hole_calculus(&presets::annulus(0.5, None), &Source::Constant(1.0), 0.04).unwrap();
    let m = hc.m_matrix[0][0];
    // C = 1: Φ = Φ⁰ − M
    let weak = hc.flux_for(&[1.0]);
    assert!((weak[0] - (hc.phi0[0] - m)).abs() < 1e-9 * m);
    let circ = hc.circulation_for(&[1.0]);
    assert!((circ[0] - (hc.phi0_circulation[0] - m)).abs() < 0.05 * m, "{circ:?}");
    // only vᵀM⁻¹v reproduces the energy of ψ⁰ + Cθ
    for c in [-1.0, 1.0] {
        let target = hc.flux_for(&[c]);
        let energy = hc.energy_for(&[c]);
        let inv = gauge_minimized_s_with(&hc, &target, FluxNorm::InverseM).unwrap();
        let mm = gauge_minimized_s_with(&hc, &target, FluxNorm::MInner).unwrap();
        assert!((inv - energy).abs() < 1e-9 * energy);
        assert!((mm - energy).abs() > 1e-2 * energy);
    }
    // k = 1, C = 0: base value
    assert!((hc.energy_for(&[0.0]) - hc.s_base).abs() < 1e-10 * hc.s_base);
}

#[test]
fn gauge_minimum_and_parabola() {
    let hc = hole_calculus(&presets::annulus(0.5, None), &Source::Constant(1.0), 0.05).unwrap();
    let p0 = hc.phi0[0];
    assert_eq!(gauge_minimized_s(&hc, &[p0]).unwrap(), hc.s_base);
    let f = |d: f64| gauge_minimized_s(&hc, &[p0 + d]).unwrap();
    let (a, b, c) = (f(-1.0), f(0.0), f(1.0));
    let curvature = 0.5 * (a - 2.0 * b + c);
    assert!((curvature - 1.0 / hc.m_matrix[0][0]).abs() < 1e-10);
    assert!((f(0.7) - f(-0.7)).abs() < 1e-12);
}

#[test]
fn lattice_minimum_is_shift_invariant() {
    let hc = hole_calculus(&presets::annulus(0.5, None), &Source::Constant(1.0), 0.05).unwrap();
    let phi = [hc.phi0[0] + 4.1];
    let (v, _) = lattice_minimized_s(&hc, &phi).unwrap();
    for g in [-3i64, -1, 2, 5] {
        let (w, _) = lattice_minimized_s(&hc, &[phi[0] + 2.0 * PI * g as f64]).unwrap();
        assert!((v - w).abs() <= 1e-12 * v, "{v} vs {w}");
    }
}
