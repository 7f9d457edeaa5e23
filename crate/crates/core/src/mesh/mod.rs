//! Conforming triangulations with tagged boundary edges.

mod build;
pub mod io;

pub use build::triangulate;

use crate::geometry::{BoundaryTag, DomainSpec, Point};
use serde::Serialize;
use std::collections::HashMap;
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct TriMesh {
    pub vertices: Vec<Point>,
    /// Counterclockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    /// Boundary edges oriented with Ω on the left.
    pub boundary_edges: Vec<([usize; 2], BoundaryTag)>,
    pub h_max: f64,
    /// Curve parameter of every boundary vertex, when the analytic domain is known.
    boundary_params: Vec<Option<(BoundaryTag, f64)>>,
    domain: Option<Arc<DomainSpec>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeshQuality {
    pub h_max: f64,
    pub h_min: f64,
    /// Degrees.
    pub min_angle: f64,
    pub vertex_count: usize,
    pub triangle_count: usize,
}

impl TriMesh {
    /// Mesh from raw arrays; triangles are reoriented counterclockwise.
    pub fn from_parts(
        vertices: Vec<Point>,
        mut triangles: Vec<[usize; 3]>,
        boundary_edges: Vec<([usize; 2], BoundaryTag)>,
    ) -> Self {
        for t in &mut triangles {
            if signed_area(&vertices, *t) < 0.0 {
                t.swap(1, 2);
            }
        }
        let n = vertices.len();
        let mut m = TriMesh { vertices, triangles, boundary_edges, h_max: 0.0, boundary_params: vec![None; n], domain: None };
        m.h_max = m.quality().h_max;
        m
    }

    pub fn domain(&self) -> Option<&DomainSpec> {
        self.domain.as_deref()
    }

    pub fn boundary_param(&self, v: usize) -> Option<(BoundaryTag, f64)> {
        self.boundary_params.get(v).copied().flatten()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        signed_area(&self.vertices, self.triangles[t])
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn boundary_length(&self) -> f64 {
        self.boundary_edges.iter().map(|&([a, b], _)| dist(self.vertices[a], self.vertices[b])).sum()
    }

    /// Distinct boundary tags, sorted (outer first).
    pub fn boundary_tags(&self) -> Vec<BoundaryTag> {
        let mut tags: Vec<BoundaryTag> = self.boundary_edges.iter().map(|e| e.1).collect();
        tags.sort();
        tags.dedup();
        tags
    }

    /// Per-vertex boundary tag (`None` for interior vertices).
    pub fn vertex_tags(&self) -> Vec<Option<BoundaryTag>> {
        let mut tags = vec![None; self.vertices.len()];
        for &([a, b], tag) in &self.boundary_edges {
            tags[a] = Some(tag);
            tags[b] = Some(tag);
        }
        tags
    }

    /// Closed vertex chains of the boundary, following edge orientation.
    pub fn boundary_loops(&self) -> Vec<(BoundaryTag, Vec<usize>)> {
        let next: HashMap<usize, (usize, BoundaryTag)> =
            self.boundary_edges.iter().map(|&([a, b], tag)| (a, (b, tag))).collect();
        let mut starts: Vec<usize> = next.keys().copied().collect();
        starts.sort_unstable();
        let mut seen = vec![false; self.vertices.len()];
        let mut loops = Vec::new();
        for s in starts {
            if seen[s] {
                continue;
            }
            let tag = next[&s].1;
            let mut chain = vec![s];
            seen[s] = true;
            let mut cur = next[&s].0;
            while cur != s {
                if seen[cur] {
                    break;
                }
                seen[cur] = true;
                chain.push(cur);
                match next.get(&cur) {
                    Some(&(n, _)) => cur = n,
                    None => break,
                }
            }
            loops.push((tag, chain));
        }
        loops.sort_by_key(|l| l.0);
        loops
    }

    /// Absolute area enclosed by a closed vertex chain.
    pub fn loop_area(&self, chain: &[usize]) -> f64 {
        let n = chain.len();
        let twice: f64 = (0..n)
            .map(|i| {
                let p = self.vertices[chain[i]];
                let q = self.vertices[chain[(i + 1) % n]];
                p[0] * q[1] - q[0] * p[1]
            })
            .sum();
        0.5 * twice.abs()
    }

    /// Triangle adjacent to each boundary edge, in `boundary_edges` order.
    pub fn boundary_edge_triangles(&self) -> Vec<usize> {
        let mut owner: HashMap<(usize, usize), usize> = HashMap::with_capacity(3 * self.triangles.len());
        for (ti, t) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                owner.insert((t[k], t[(k + 1) % 3]), ti);
            }
        }
        self.boundary_edges.iter().map(|&([a, b], _)| owner.get(&(a, b)).copied().unwrap_or(usize::MAX)).collect()
    }

    /// Largest distance of a boundary vertex from its analytic curve.
    pub fn boundary_deviation(&self) -> Option<f64> {
        let domain = self.domain.as_ref()?;
        let comps = domain.components().ok()?;
        let mut worst: f64 = 0.0;
        for (v, bp) in self.boundary_params.iter().enumerate() {
            if let Some((tag, t)) = bp {
                let c = comps.iter().find(|c| c.tag == *tag)?;
                let tt = c.curve.closest_parameter(self.vertices[v], *t);
                worst = worst.max(dist(c.curve.point(tt), self.vertices[v]));
            }
        }
        Some(worst)
    }

    pub fn quality(&self) -> MeshQuality {
        let mut h_max: f64 = 0.0;
        let mut h_min = f64::INFINITY;
        let mut min_angle = f64::INFINITY;
        for t in &self.triangles {
            let p = [self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]];
            let l = [dist(p[1], p[2]), dist(p[2], p[0]), dist(p[0], p[1])];
            for k in 0..3 {
                h_max = h_max.max(l[k]);
                h_min = h_min.min(l[k]);
                let (a, b, c) = (l[k], l[(k + 1) % 3], l[(k + 2) % 3]);
                let cos = ((b * b + c * c - a * a) / (2.0 * b * c)).clamp(-1.0, 1.0);
                min_angle = min_angle.min(cos.acos().to_degrees());
            }
        }
        MeshQuality { h_max, h_min, min_angle, vertex_count: self.vertices.len(), triangle_count: self.triangles.len() }
    }

    /// Uniform red refinement; boundary midpoints are projected onto the
    /// analytic curve when the domain is known.
    pub fn refine(&self) -> TriMesh {
        let comps = self.domain.as_ref().and_then(|d| d.components().ok());
        let mut vertices = self.vertices.clone();
        let mut params = self.boundary_params.clone();
        let mut mid: HashMap<(usize, usize), usize> = HashMap::with_capacity(3 * self.triangles.len());
        let boundary: HashMap<(usize, usize), BoundaryTag> =
            self.boundary_edges.iter().map(|&([a, b], t)| ((a.min(b), a.max(b)), t)).collect();
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Point>, params: &mut Vec<Option<(BoundaryTag, f64)>>| {
            let key = (a.min(b), a.max(b));
            if let Some(&m) = mid.get(&key) {
                return m;
            }
            let (pa, pb) = (vertices[a], vertices[b]);
            let mut p = [(pa[0] + pb[0]) / 2.0, (pa[1] + pb[1]) / 2.0];
            let mut bp = None;
            if let (Some(tag), Some(comps)) = (boundary.get(&key), comps.as_ref()) {
                if let (Some((_, ta)), Some((_, tb)), Some(c)) =
                    (params[a], params[b], comps.iter().find(|c| c.tag == *tag))
                {
                    let tau = std::f64::consts::TAU;
                    let mut d = tb - ta;
                    if d > tau / 2.0 {
                        d -= tau;
                    } else if d < -tau / 2.0 {
                        d += tau;
                    }
                    let t = c.curve.closest_parameter(p, (ta + d / 2.0).rem_euclid(tau));
                    p = c.curve.point(t);
                    bp = Some((*tag, t));
                }
            }
            vertices.push(p);
            params.push(bp);
            mid.insert(key, vertices.len() - 1);
            vertices.len() - 1
        };
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for &[a, b, c] in &self.triangles {
            let ab = midpoint(a, b, &mut vertices, &mut params);
            let bc = midpoint(b, c, &mut vertices, &mut params);
            let ca = midpoint(c, a, &mut vertices, &mut params);
            triangles.extend_from_slice(&[[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
        }
        let mut boundary_edges = Vec::with_capacity(2 * self.boundary_edges.len());
        for &([a, b], tag) in &self.boundary_edges {
            let m = midpoint(a, b, &mut vertices, &mut params);
            boundary_edges.push(([a, m], tag));
            boundary_edges.push(([m, b], tag));
        }
        let mut out = TriMesh { vertices, triangles, boundary_edges, h_max: 0.0, boundary_params: params, domain: self.domain.clone() };
        out.h_max = out.quality().h_max;
        out
    }

    /// Mesh of the image under x ↦ s·x (boundary parameters carried along).
    pub fn scaled(&self, s: f64) -> TriMesh {
        let mut m = self.clone();
        for v in &mut m.vertices {
            v[0] *= s;
            v[1] *= s;
        }
        m.h_max *= s;
        m.domain = self.domain.as_ref().map(|d| Arc::new(d.scaled(s)));
        m
    }
}

pub(crate) fn signed_area(v: &[Point], t: [usize; 3]) -> f64 {
    let (a, b, c) = (v[t[0]], v[t[1]], v[t[2]]);
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn equilateral() -> TriMesh {
        let s = 3f64.sqrt() / 2.0;
        TriMesh::from_parts(
            vec![[0.0, 0.0], [1.0, 0.0], [0.5, s]],
            vec![[0, 2, 1]],
            vec![([0, 1], BoundaryTag::Outer), ([1, 2], BoundaryTag::Outer), ([2, 0], BoundaryTag::Outer)],
        )
    }

    #[test]
    fn single_equilateral_quality() {
        let m = equilateral();
        let q = m.quality();
        assert!((q.min_angle - 60.0).abs() < 1e-9);
        assert!(m.triangle_area(0) > 0.0);
    }

    #[test]
    fn red_refinement_quadruples() {
        let m = equilateral();
        let r = m.refine();
        assert_eq!(r.triangle_count(), 4);
        assert_eq!(r.boundary_loops().len(), 1);
        assert!((r.total_area() - m.total_area()).abs() < 1e-15);
        assert!((r.h_max - 0.5).abs() < 1e-15);
        assert!((r.quality().min_angle - 60.0).abs() < 1e-9);
    }
}
