use magspec::fem::BoundaryCondition::{Dirichlet, Neumann};
use magspec::radial::*;
use magspec::Error;

/// Second-order finite differences for −(r u′)′/r + (m/r − Br/2)² u on
/// (r1, r2) with Dirichlet ends, by bisection on the Sturm count.
fn fd_annulus_lowest(m: f64, b: f64, r1: f64, r2: f64, n: usize) -> f64 {
    let h = (r2 - r1) / n as f64;
    let r = |i: usize| r1 + i as f64 * h;
    let diag: Vec<f64> = (1..n)
        .map(|i| {
            let (rm, rp, ri) = (r(i) - 0.5 * h, r(i) + 0.5 * h, r(i));
            (rm + rp) / (ri * h * h) + (m / ri - 0.5 * b * ri).powi(2)
        })
        .collect();
    let off: Vec<f64> = (1..n - 1).map(|i| -(r(i) + 0.5 * h) / (h * h * (r(i) * r(i + 1)).sqrt())).collect();
    let count = |x: f64| {
        let mut c = 0;
        let mut d = diag[0] - x;
        if d < 0.0 {
            c += 1;
        }
        for i in 1..diag.len() {
            d = diag[i] - x - off[i - 1] * off[i - 1] / d;
            if d < 0.0 {
                c += 1;
            }
        }
        c
    };
    let (mut lo, mut hi) = (0.0, 1e4);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn dirichlet_disc_at_zero_field_is_bessel_zero_squared() {
    let j01 = 2.404825557695773f64;
    let (l, m) = disc_ground_state(1.0, 0.0, Dirichlet).unwrap();
    assert_eq!(m, 0);
    assert!((l - j01 * j01).abs() < 1e-7, "{l}");
    let (l2, _) = disc_ground_state(2.0, 0.0, Dirichlet).unwrap();
    assert!((l2 - j01 * j01 / 4.0).abs() < 1e-7);
}

#[test]
fn annulus_fiber_matches_finite_differences() {
    for (m, b) in [(0, 0.0), (2, 3.0), (5, 10.0)] {
        let p = FiberProblem::annulus(m, b, 0.5, 1.5, Dirichlet);
        let ours = p.lowest().unwrap();
        let f1 = fd_annulus_lowest(m as f64, b, 0.5, 1.5, 2000);
        let f2 = fd_annulus_lowest(m as f64, b, 0.5, 1.5, 4000);
        let fd = (4.0 * f2 - f1) / 3.0;
        assert!((ours - fd).abs() < 1e-6 * fd, "m={m} B={b}: {ours} vs {fd}");
    }
}

#[test]
fn landau_level_limits() {
    // the Dirichlet gap above B is exponentially small in B
    let b = 200.0;
    let (ld, _) = disc_ground_state(1.0, b, Dirichlet).unwrap();
    assert!((ld - b).abs() < 1e-9 * b, "{ld}");
    let (ln, _) = disc_ground_state(1.0, b, Neumann).unwrap();
    assert!(ln < b && ln > 0.5 * b, "{ln}");
}

#[test]
fn neumann_below_dirichlet_on_every_fiber() {
    for m in -3..8 {
        let n = FiberProblem::disc(m, 7.0, 1.0, Neumann).lowest().unwrap();
        let d = FiberProblem::disc(m, 7.0, 1.0, Dirichlet).lowest().unwrap();
        assert!(n < d, "m={m}");
    }
}

#[test]
fn disc_scaling() {
    // λ(B, D_R) = R⁻² λ(B R², D_1)
    let (a, ma) = disc_ground_state(2.0, 3.0, Neumann).unwrap();
    let (b, mb) = disc_ground_state(1.0, 12.0, Neumann).unwrap();
    assert_eq!(ma, mb);
    assert!((a - b / 4.0).abs() < 1e-9 * a);
}

#[test]
fn window_edge_is_an_error() {
    match disc_eigenvalue(1.0, 400.0, Neumann, 5) {
        Err(Error::Window { m_star, lo, hi }) => assert!(m_star == lo || m_star == hi),
        other => {
            // the optimum may genuinely lie inside a narrow window
            let (_, m) = other.unwrap();
            assert!((m - 200).abs() < 5);
        }
    }
    assert!(disc_eigenvalue(1.0, 10.0, Neumann, 2).is_err());
}

#[test]
fn spectrum_is_sorted_and_starts_at_ground_state() {
    let s = disc_spectrum(1.0, 10.0, Neumann, 4).unwrap();
    assert_eq!(s.len(), 4);
    assert!(s.windows(2).all(|w| w[0].0 <= w[1].0));
    assert_eq!(s[0], disc_ground_state(1.0, 10.0, Neumann).unwrap());
}

#[test]
fn de_gennes_constants_and_cache() {
    let d = de_gennes();
    assert!((0.55..0.62).contains(&d.theta0));
    assert!((d.theta0 - d.xi_star * d.xi_star).abs() < 1e-6);
    // curvature constant from the fit agrees with the ground-state formula
    assert!((d.c1_estimate - d.c1_from_ground_state).abs() < 3.0 * d.c1_stderr.max(1e-3));
    let path = std::env::temp_dir().join(format!("magspec-degennes-{}.json", std::process::id()));
    std::fs::write(&path, d.to_json()).unwrap();
    let back = DeGennes::load_or_compute(&path, &d.grid).unwrap();
    assert_eq!(back.theta0, d.theta0);
    let _ = std::fs::remove_file(&path);
}

#[test]
fn annulus_beats_disc_at_large_field() {
    let r2 = 5f64.sqrt() / 2.0;
    let (a, _) = annulus_ground_state(0.5, r2, 80.0, Neumann).unwrap();
    let (d, _) = disc_ground_state(1.0, 80.0, Neumann).unwrap();
    assert!(a > d, "{a} {d}");
}

#[test]
fn annulus_dirichlet_matches_fem() {
    use magspec::fem::VectorPotential;
    use magspec::geometry::presets;
    use magspec::mesh::triangulate;
    use magspec::spectrum::solve_spectrum;
    let (rad, m) = annulus_ground_state(0.5, 1.0, 0.0, Dirichlet).unwrap();
    assert_eq!(m, 0);
    let mesh = std::sync::Arc::new(triangulate(&presets::annulus(0.5, Some(1.0)), 0.04).unwrap());
    let fem = solve_spectrum(&mesh, &VectorPotential::Symmetric, 0.0, Dirichlet, 1, 1e-9).unwrap().lambda1();
    assert!((fem - rad).abs() < 1e-2 * rad, "{fem} {rad}");
}

#[test]
fn optimal_fiber_tracks_flux() {
    for b in [10.0, 40.0, 160.0] {
        let (_, m) = disc_ground_state(1.0, b, Neumann).unwrap();
        let off = (m as f64 - b / 2.0).abs();
        assert!(off <= 2.0 * b.sqrt(), "B={b}: m*={m}");
    }
}
