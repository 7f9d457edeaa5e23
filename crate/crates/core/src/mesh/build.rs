use super::{signed_area, TriMesh};
use crate::error::{Error, Result};
use crate::geometry::{polygon, BoundaryTag, Component, DomainSpec, Point};
use spade::{AngleLimit, ConstrainedDelaunayTriangulation, Point2, RefinementParameters, Triangulation};
use std::collections::{HashMap, HashSet};
use std::f64::consts::TAU;
use std::sync::Arc;

/// Boundary nodes placed with local spacing min(h, c/|κ|) so chords stay close to the curve.
const CURVATURE_SPACING: f64 = 0.4;

fn sample_component(c: &Component, h: f64) -> Vec<f64> {
    let fine = 8192;
    let mut breaks = c.curve.corner_parameters();
    breaks.sort_by(f64::total_cmp);
    if breaks.is_empty() {
        breaks.push(0.0);
    }
    let mut ts = Vec::new();
    let nb = breaks.len();
    for i in 0..nb {
        let t0 = breaks[i];
        let t1 = if i + 1 < nb { breaks[i + 1] } else { breaks[0] + TAU };
        let steps = ((fine as f64 * (t1 - t0) / TAU).ceil() as usize).max(16);
        let dt = (t1 - t0) / steps as f64;
        // cumulative count of segments G(t) = ∫ |x'| / spacing dt
        let density = |t: f64| {
            let cp = c.curve.eval(t);
            let k = cp.curvature().abs();
            let spacing = if k > 0.0 { h.min(CURVATURE_SPACING / k) } else { h };
            cp.speed() / spacing
        };
        let mut g = vec![0.0; steps + 1];
        let mut prev = density(t0);
        for j in 1..=steps {
            let cur = density(t0 + j as f64 * dt);
            g[j] = g[j - 1] + 0.5 * dt * (prev + cur);
            prev = cur;
        }
        let n = (g[steps].ceil() as usize).max(if nb == 1 { 3 } else { 1 });
        let mut j = 0;
        for s in 0..n {
            let target = g[steps] * s as f64 / n as f64;
            while j + 1 < steps && g[j + 1] < target {
                j += 1;
            }
            let frac = if g[j + 1] > g[j] { (target - g[j]) / (g[j + 1] - g[j]) } else { 0.0 };
            ts.push((t0 + (j as f64 + frac) * dt).rem_euclid(TAU));
        }
    }
    ts
}

fn min_clearance(loops: &[Vec<Point>]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..loops.len() {
        for j in i + 1..loops.len() {
            for p in loops[i].iter().step_by(4) {
                best = best.min(polygon::boundary_distance(&loops[j], *p));
            }
        }
    }
    best
}

/// Constrained Delaunay mesh of the domain refined to edge size ≈ `target_h`
/// and minimum angle 25°.
pub fn triangulate(domain: &DomainSpec, target_h: f64) -> Result<TriMesh> {
    if !(target_h > 0.0 && target_h.is_finite()) {
        return Err(Error::Mesh(format!("target_h must be positive, got {target_h}")));
    }
    domain.validate().map_err(|e| Error::Mesh(format!("invalid domain: {e}")))?;
    let comps = domain.components()?;
    let loops: Vec<Vec<Point>> = comps.iter().map(|c| c.curve.sample(1024)).collect();
    let clearance = min_clearance(&loops);
    if target_h >= clearance {
        return Err(Error::Mesh(format!("target_h {target_h} is not below the hole clearance {clearance}")));
    }
    let (lo, hi) = domain.bounding_box()?;
    let extent = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    if target_h > 0.5 * extent {
        return Err(Error::Mesh(format!("target_h {target_h} exceeds half the domain extent {extent}")));
    }
    let samples: Vec<Vec<f64>> = comps.iter().map(|c| sample_component(c, target_h)).collect();

    let mut area_factor = 1.0;
    for _attempt in 0..5 {
        let mesh = attempt(domain, &comps, &samples, target_h, area_factor)?;
        if mesh.h_max <= 1.5 * target_h {
            return Ok(mesh);
        }
        area_factor *= 0.7;
    }
    Err(Error::Mesh(format!("could not reach h_max ≤ 1.5·{target_h}")))
}

fn attempt(
    domain: &DomainSpec,
    comps: &[Component],
    samples: &[Vec<f64>],
    h: f64,
    area_factor: f64,
) -> Result<TriMesh> {
    let mut cdt: ConstrainedDelaunayTriangulation<Point2<f64>> = ConstrainedDelaunayTriangulation::new();
    let mut known: HashMap<usize, (BoundaryTag, f64)> = HashMap::new();
    for (c, ts) in comps.iter().zip(samples) {
        let mut handles = Vec::with_capacity(ts.len());
        for &t in ts {
            let p = c.curve.point(t);
            let hnd = cdt.insert(Point2::new(p[0], p[1])).map_err(|e| Error::Mesh(format!("insertion failed: {e:?}")))?;
            known.insert(hnd.index(), (c.tag, t));
            handles.push(hnd);
        }
        for i in 0..handles.len() {
            let (a, b) = (handles[i], handles[(i + 1) % handles.len()]);
            if !cdt.can_add_constraint(a, b) {
                return Err(Error::Mesh("boundary sampling produced crossing constraint edges".into()));
            }
            cdt.add_constraint(a, b);
        }
    }
    let max_area = area_factor * 3f64.sqrt() / 4.0 * h * h;
    let budget = (40.0 * domain_area_estimate(comps) / max_area) as usize + 10 * cdt.num_vertices();
    let result = cdt.refine(
        RefinementParameters::<f64>::new()
            .exclude_outer_faces(true)
            .with_angle_limit(AngleLimit::from_deg(25.0))
            .with_max_allowed_area(max_area)
            .with_max_additional_vertices(budget),
    );
    if !result.refinement_complete {
        return Err(Error::Mesh("Delaunay refinement did not complete".into()));
    }
    let excluded: HashSet<_> = result.excluded_faces.iter().copied().collect();

    // compact vertices used by interior faces
    let mut index = vec![usize::MAX; cdt.num_vertices()];
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for f in cdt.inner_faces() {
        if excluded.contains(&f.fix()) {
            continue;
        }
        let vs = f.vertices();
        let mut tri = [0usize; 3];
        for (k, v) in vs.iter().enumerate() {
            let raw = v.fix().index();
            if index[raw] == usize::MAX {
                index[raw] = vertices.len();
                let p = v.position();
                vertices.push([p.x, p.y]);
            }
            tri[k] = index[raw];
        }
        triangles.push(tri);
    }
    let mut params: Vec<Option<(BoundaryTag, f64)>> = vec![None; vertices.len()];
    for (raw, &(tag, t)) in &known {
        if index[*raw] != usize::MAX {
            params[index[*raw]] = Some((tag, t));
        }
    }

    // boundary edges: edges used by exactly one triangle
    let mut count: HashMap<(usize, usize), usize> = HashMap::with_capacity(3 * triangles.len());
    for t in &triangles {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            *count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    let mut directed: Vec<[usize; 2]> = Vec::new();
    for t in &triangles {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            if count[&(a.min(b), a.max(b))] == 1 {
                directed.push([a, b]);
            }
        }
    }
    let mut mesh = TriMesh {
        vertices,
        triangles,
        boundary_edges: directed.iter().map(|&e| (e, BoundaryTag::Outer)).collect(),
        h_max: 0.0,
        boundary_params: params,
        domain: Some(Arc::new(domain.clone())),
    };
    assign_loops(&mut mesh, comps)?;
    if mesh.triangles.iter().any(|&t| signed_area(&mesh.vertices, t) <= 0.0) {
        return Err(Error::Mesh("projection onto the boundary inverted a triangle; decrease target_h".into()));
    }
    mesh.h_max = mesh.quality().h_max;
    Ok(mesh)
}

fn domain_area_estimate(comps: &[Component]) -> f64 {
    comps.iter().map(|c| polygon::signed_area(&c.curve.sample(256))).sum::<f64>().abs()
}

/// Tags each boundary loop and projects vertices inserted on boundary chords
/// onto the analytic curve.
fn assign_loops(mesh: &mut TriMesh, comps: &[Component]) -> Result<()> {
    let loops = mesh.boundary_loops();
    if loops.len() != comps.len() {
        return Err(Error::Mesh(format!("found {} boundary loops, expected {}", loops.len(), comps.len())));
    }
    let mut tag_of_vertex: HashMap<usize, BoundaryTag> = HashMap::new();
    let mut seen_tags = HashSet::new();
    for (_, chain) in &loops {
        let tag = chain
            .iter()
            .find_map(|&v| mesh.boundary_params[v].map(|p| p.0))
            .ok_or_else(|| Error::Mesh("boundary loop without sampled vertices".into()))?;
        if !seen_tags.insert(tag) {
            return Err(Error::Mesh("two boundary loops map to the same curve".into()));
        }
        let comp = comps.iter().find(|c| c.tag == tag).expect("tag from components");
        let n = chain.len();
        let anchors: Vec<usize> = (0..n).filter(|&i| mesh.boundary_params[chain[i]].is_some()).collect();
        for (ai, &a) in anchors.iter().enumerate() {
            let b = anchors[(ai + 1) % anchors.len()];
            let gap = (b + n - a) % n;
            let gap = if gap == 0 { n } else { gap };
            if gap <= 1 {
                continue;
            }
            let (ta, tb) = (mesh.boundary_params[chain[a]].unwrap().1, mesh.boundary_params[chain[b % n]].unwrap().1);
            let mut d = tb - ta;
            if d <= -TAU / 2.0 {
                d += TAU;
            } else if d > TAU / 2.0 {
                d -= TAU;
            }
            // chord-length fractions along the chain
            let mut acc = vec![0.0];
            for s in 0..gap {
                let (p, q) = (mesh.vertices[chain[(a + s) % n]], mesh.vertices[chain[(a + s + 1) % n]]);
                acc.push(acc[s] + (p[0] - q[0]).hypot(p[1] - q[1]));
            }
            for s in 1..gap {
                let v = chain[(a + s) % n];
                let guess = (ta + d * acc[s] / acc[gap]).rem_euclid(TAU);
                let t = comp.curve.closest_parameter(mesh.vertices[v], guess);
                mesh.vertices[v] = comp.curve.point(t);
                mesh.boundary_params[v] = Some((tag, t));
            }
        }
        for &v in chain {
            tag_of_vertex.insert(v, tag);
        }
    }
    for e in &mut mesh.boundary_edges {
        e.1 = tag_of_vertex[&e.0[0]];
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::presets;
    use std::f64::consts::PI;

    #[test]
    fn disc_mesh_area_and_quality() {
        let m = triangulate(&presets::disc(1.0), 0.1).unwrap();
        let q = m.quality();
        assert!(q.min_angle >= 20.0, "{q:?}");
        assert!(q.h_max <= 0.15, "{q:?}");
        assert!((m.total_area() - PI).abs() < 0.02);
        assert!(m.boundary_deviation().unwrap() < 1e-12);
        assert_eq!(m.boundary_loops().len(), 1);
    }

    #[test]
    fn annulus_has_two_tagged_loops() {
        let m = triangulate(&presets::annulus(0.5, None), 0.05).unwrap();
        let loops = m.boundary_loops();
        assert_eq!(loops.len(), 2);
        assert_eq!(loops[0].0, BoundaryTag::Outer);
        assert_eq!(loops[1].0, BoundaryTag::Hole(0));
        let r: f64 = loops[1].1.iter().map(|&v| m.vertices[v][0].hypot(m.vertices[v][1])).sum::<f64>() / loops[1].1.len() as f64;
        assert!((r - 0.5).abs() < 1e-12);
    }

    #[test]
    fn coarse_h_is_rejected() {
        assert!(matches!(triangulate(&presets::annulus(0.9, Some(1.0)), 0.2), Err(Error::Mesh(_))));
    }
}
