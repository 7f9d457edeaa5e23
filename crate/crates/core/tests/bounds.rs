use magspec::bounds::*;
use magspec::fem::BoundaryCondition;
use magspec::geometry::presets;
use std::f64::consts::PI;

fn ctx() -> Context {
    Context { domain: "x".into(), b: Some(1.0), mesh_h: 0.1 }
}

#[test]
fn slack_and_verdict_follow_relation() {
    let r = BoundReport::new("t", ctx(), Relation::Le, 1.0, 2.0, 0.1, false, ("a", "b"));
    assert_eq!((r.slack, r.verdict), (1.0, Verdict::Holds));
    let r = BoundReport::new("t", ctx(), Relation::Ge, 1.0, 2.0, 0.1, false, ("a", "b"));
    assert_eq!((r.slack, r.verdict), (-1.0, Verdict::Violated));
    let r = BoundReport::new("t", ctx(), Relation::Ge, 1.95, 2.0, 0.1, false, ("a", "b"));
    assert_eq!(r.verdict, Verdict::Holds);
    let r = BoundReport::new("t", ctx(), Relation::Le, 1.0, 1.05, 0.1, true, ("a", "b"));
    assert_eq!(r.verdict, Verdict::Inconclusive);
}

#[test]
fn report_json_has_schema_keys() {
    let r = BoundReport::new("t", ctx(), Relation::Le, 1.0, 2.0, 0.1, false, ("a", "b"));
    let v = serde_json::to_value(&r).unwrap();
    for k in ["name", "context", "lhs", "rhs", "slack", "tolerance", "verdict", "provenance"] {
        assert!(v.get(k).is_some(), "{k}");
    }
    assert_eq!(v["verdict"], "holds");
    assert!(reports_csv(&[r]).starts_with(REPORT_CSV_HEADER));
}

#[test]
fn ekp_small_field_coefficient() {
    let (a, r_in, l2) = (PI, 1.0f64, 3.39);
    for b in [1e-3, 1e-4] {
        let ratio = ekp_rhs(b, a, r_in, l2) / (PI / (24.0 * a) * b * b * r_in.powi(4));
        assert!((ratio - 1.0).abs() < 1e-5, "{ratio}");
    }
}

#[test]
fn ekp_tie_takes_larger_branch() {
    let (a, r_in, l2) = (2.0, 0.5f64, 1.5);
    let crit = r_in.powi(-2);
    let low = PI / (4.0 * a) * crit * crit * r_in.powi(4) * l2 / (crit * crit * r_in * r_in + 6.0 * l2);
    let high = PI / (32.0 * a) * l2 / (crit + 12.0 * l2);
    assert_eq!(ekp_rhs(crit, a, r_in, l2), low.max(high));
    assert!(ekp_rhs(crit * 1.5, a, r_in, l2) > 0.0);
}

#[test]
fn registry_lookup_and_replacement() {
    let mut reg = Registry::standard();
    let names = reg.names();
    for n in ["erdos", "ekp", "weak_field", "strong_field", "colbois_savo", "saint_venant", "multi_hole", "geometry"] {
        assert!(names.contains(&n), "{n}");
    }
    let before = names.len();
    reg.register(Box::new(ColboisSavo { beta: magspec::fem::Source::Constant(2.0) }));
    assert_eq!(reg.names().len(), before);
    let st = Study::new(presets::disc(1.0), 0.2).unwrap();
    assert!(reg.run(&st, &[1.0], &["nonsense"]).is_err());
}

#[test]
fn field_grid_shapes() {
    let g = field_grid(0.1, 60.0, 40, true).unwrap();
    assert_eq!(g.len(), 40);
    assert!((g[0] - 0.1).abs() < 1e-15 && (g[39] - 60.0).abs() < 1e-12);
    assert!((g[1] / g[0] - g[39] / g[38]).abs() < 1e-12);
    assert_eq!(field_grid(0.0, 1.0, 3, false).unwrap(), vec![0.0, 0.5, 1.0]);
    assert!(field_grid(0.0, 1.0, 3, true).is_err());
}

#[test]
fn weak_field_bound_is_sharp_for_small_field() {
    let st = Study::new(presets::ellipse(1.5, 1.0 / 1.5), 0.05).unwrap();
    let rows = check_weak_field(&st, 0.1).unwrap();
    let r = &rows[0];
    assert!((r.lhs / r.rhs - 1.0).abs() < 2e-3, "{} {}", r.lhs, r.rhs);
    assert!(rows.iter().all(|r| r.holds()));
}

#[test]
fn disc_scan_matches_itself() {
    let st = Study::new(presets::disc(1.0), 0.05).unwrap();
    let grid = field_grid(0.5, 20.0, 6, true).unwrap();
    let scan = scan_reverse_faber_krahn(&st, &grid).unwrap();
    assert_eq!(scan.label, "evidence");
    assert_eq!(scan.violations(), 0);
    for r in &scan.rows {
        assert!(r.slack.abs() < 1e-2 * r.lambda_disc.max(1.0), "{r:?}");
    }
    assert!(scan.to_csv().lines().count() == 7);
}

#[test]
fn annulus_checks() {
    let st = Study::new(presets::annulus(0.5, Some(1.0)), 0.05).unwrap();
    let reg = Registry::standard();
    let rows = reg.run(&st, &[1.0, 5.0], &[]).unwrap();
    assert!(rows.iter().all(|r| r.verdict != Verdict::Violated), "{rows:#?}");
    assert!(rows.iter().any(|r| r.name == "multi_hole"));
    assert!(!rows.iter().any(|r| r.name == "saint_venant"));
    let sharp = rows.iter().find(|r| r.name == "multi_hole").unwrap();
    assert!(sharp.slack.abs() < 1e-3, "constant-modulus trial is near optimal at small B: {sharp:?}");
}

#[test]
fn erdos_and_torsion_rows_on_ellipse() {
    let st = Study::new(presets::ellipse(2.0, 0.5), 0.05).unwrap();
    let e = check_erdos(&st, 5.0).unwrap();
    assert!(e.holds() && e.slack > 1.0);
    let dg = st.eigenvalue(0.0, BoundaryCondition::Dirichlet, 1).unwrap();
    assert!(dg.error < 0.05 * dg.value);
    let reg = Registry::standard();
    let rows = reg.run(&st, &[], &["saint_venant", "talenti", "torsion_lower", "polya", "geometry"]).unwrap();
    assert!(rows.len() >= 7);
    assert!(rows.iter().all(|r| r.holds()), "{rows:#?}");
}
