//! Torsion function ψ (Δψ = β, ψ = 0 on ∂Ω), the rigidity S = −∫βψ, the
//! stream potential ∇⊥ψ, Schwarz symmetrization of β and the circulation
//! calculus for domains with holes.

use crate::error::{Error, Result};
use crate::fem::{Dirichlet, Element, FactoredPoisson, P1Operators, ScalarField, Source, StreamPotential, VectorPotential};
use crate::geometry::{BoundaryTag, DomainSpec};
use crate::mesh::{triangulate, TriMesh};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone, Serialize)]
pub struct TorsionResult {
    /// −∫βψ.
    pub s_omega: f64,
    pub psi_min: f64,
    pub psi: ScalarField,
    /// |∫|∇ψ|² + ∫βψ|.
    pub formula_gap: f64,
    /// ∫|∇ψ|².
    pub energy: f64,
    pub mesh_h: f64,
}

fn nodal_beta(mesh: &TriMesh, beta: &Source) -> Result<Vec<f64>> {
    let b = beta.nodal_values(mesh)?;
    if let Some(v) = b.iter().find(|v| **v < 0.0) {
        return Err(Error::InvalidInput(format!("β must be non-negative, found {v}")));
    }
    Ok(b)
}

pub fn torsion_solve(domain: &DomainSpec, beta: &Source, mesh_h: f64) -> Result<TorsionResult> {
    if !domain.is_simply_connected() {
        return Err(Error::InvalidDomain("torsion_solve needs a simply connected domain; use hole_calculus".into()));
    }
    let mesh = Arc::new(triangulate(domain, mesh_h)?);
    torsion_on_mesh(&mesh, beta)
}

/// [`torsion_solve`] on an existing mesh (zero Dirichlet data on every boundary loop).
pub fn torsion_on_mesh(mesh: &Arc<TriMesh>, beta: &Source) -> Result<TorsionResult> {
    let ops = P1Operators::new(mesh.clone());
    let b = nodal_beta(mesh, beta)?;
    let psi = FactoredPoisson::new(&ops)?.solve(&Source::Nodal(b.clone()), &Dirichlet::zero())?;
    Ok(result_from(&ops, &b, psi))
}

fn result_from(ops: &P1Operators, beta: &[f64], psi: ScalarField) -> TorsionResult {
    let s_omega = -ops.mass.form(beta, &psi.values);
    let energy = ops.stiffness.form(&psi.values, &psi.values);
    TorsionResult {
        s_omega,
        psi_min: psi.min(),
        formula_gap: (energy - s_omega).abs(),
        energy,
        mesh_h: ops.mesh.h_max,
        psi,
    }
}

impl TorsionResult {
    pub fn to_json(&self, include_field: bool) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("plain data serializes");
        if !include_field {
            v.as_object_mut().map(|o| o.remove("psi"));
        }
        v
    }
}

/// 𝐀′ = ∇⊥ψ, constant on each triangle.
pub fn stream_potential(result: &TorsionResult) -> VectorPotential {
    VectorPotential::Stream(Arc::new(StreamPotential::from_psi(result.psi.mesh.clone(), &result.psi.values)))
}

/// Largest |𝐀·n| at boundary edge midpoints, with 𝐀 from the adjacent
/// triangle and n the normal of the exact boundary curve (the polygonal edge
/// normal when the mesh carries no domain). Against the edge normal the value
/// is zero up to roundoff, since ψ vanishes along the edge.
pub fn boundary_normal_defect(sp: &StreamPotential) -> f64 {
    let mesh = &sp.mesh;
    let tris = mesh.boundary_edge_triangles();
    let comps = mesh.domain().and_then(|d| d.components().ok());
    mesh.boundary_edges
        .iter()
        .zip(tris)
        .map(|(&([a, b], tag), t)| {
            let (p, q) = (mesh.vertices[a], mesh.vertices[b]);
            let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
            let len = dx.hypot(dy);
            let mut n = [dy / len, -dx / len];
            let curve = comps.as_ref().and_then(|c| c.iter().find(|c| c.tag == tag)).map(|c| &c.curve);
            if let (Some(curve), Some((_, ta))) = (curve, mesh.boundary_param(a)) {
                let mid = [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
                let d1 = curve.eval(curve.closest_parameter(mid, ta)).d1;
                let s = d1[0].hypot(d1[1]);
                let cand = [d1[1] / s, -d1[0] / s];
                // keep the orientation of the edge normal
                n = if cand[0] * n[0] + cand[1] * n[1] >= 0.0 { cand } else { [-cand[0], -cand[1]] };
            }
            let v = sp.per_triangle[t];
            (v[0] * n[0] + v[1] * n[1]).abs()
        })
        .fold(0.0, f64::max)
}

/// Counterclockwise circulation of ∇⊥ψ around one boundary loop (counterclockwise
/// about the enclosed region for holes and for the outer curve alike).
pub fn circulation(mesh: &TriMesh, psi: &[f64], tag: BoundaryTag) -> f64 {
    let tris = mesh.boundary_edge_triangles();
    let mut total = 0.0;
    for (&([a, b], t), tri) in mesh.boundary_edges.iter().zip(tris) {
        if t != tag {
            continue;
        }
        let g = Element::new(mesh, tri).gradient(psi);
        let v = [-g[1], g[0]];
        let (p, q) = (mesh.vertices[a], mesh.vertices[b]);
        // edges run with Ω on the left: counterclockwise for the outer loop, clockwise around holes
        let s = if tag == BoundaryTag::Outer { 1.0 } else { -1.0 };
        total += s * (v[0] * (q[0] - p[0]) + v[1] * (q[1] - p[1]));
    }
    total
}

/// Radially symmetric profile on [0, R].
#[derive(Debug, Clone, Serialize)]
pub struct RadialProfile {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub flux: Option<Vec<f64>>,
}

pub const RADIAL_NODES: usize = 4096;

impl RadialProfile {
    pub fn uniform(radius: f64, nodes: usize, f: impl Fn(f64) -> f64) -> Self {
        let radii: Vec<f64> = (0..nodes).map(|i| radius * i as f64 / (nodes - 1) as f64).collect();
        let values = radii.iter().map(|&r| f(r)).collect();
        Self { radii, values, flux: None }
    }

    pub fn radius(&self) -> f64 {
        *self.radii.last().unwrap_or(&0.0)
    }

    /// 2π∫rβ*(r)dr by the trapezoid rule.
    pub fn mass(&self) -> f64 {
        2.0 * PI * trapezoid(&self.radii, |i| self.radii[i] * self.values[i])
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }

    /// F(r) = ∫₀^r r′β*(r′)dr′ at every grid node.
    pub fn flux_function(&self) -> Vec<f64> {
        let mut f = vec![0.0; self.radii.len()];
        for i in 1..self.radii.len() {
            let h = self.radii[i] - self.radii[i - 1];
            f[i] = f[i - 1] + 0.5 * h * (self.radii[i] * self.values[i] + self.radii[i - 1] * self.values[i - 1]);
        }
        f
    }
}

fn trapezoid(x: &[f64], f: impl Fn(usize) -> f64) -> f64 {
    (1..x.len()).map(|i| 0.5 * (x[i] - x[i - 1]) * (f(i) + f(i - 1))).sum()
}

/// Decreasing rearrangement of nodal β onto the disc of radius `radius`,
/// using lumped-mass vertex areas (rescaled to the disc area).
pub fn schwarz_symmetrize(field: &ScalarField, radius: f64) -> Result<RadialProfile> {
    schwarz_symmetrize_with(field, radius, RADIAL_NODES)
}

pub fn schwarz_symmetrize_with(field: &ScalarField, radius: f64, nodes: usize) -> Result<RadialProfile> {
    if let Some(v) = field.values.iter().find(|v| **v < 0.0) {
        return Err(Error::InvalidInput(format!("symmetrization needs β ≥ 0, found {v}")));
    }
    if !(radius > 0.0) || nodes < 2 {
        return Err(Error::InvalidInput("symmetrization needs a positive radius and at least two nodes".into()));
    }
    let w = crate::fem::lumped_mass(&field.mesh);
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|&a, &b| field.values[b].total_cmp(&field.values[a]));
    let scale = PI * radius * radius / w.iter().sum::<f64>();
    // knots at cell midpoints in the area variable s = πr²
    let mut knots_s = Vec::with_capacity(order.len());
    let mut knots_v = Vec::with_capacity(order.len());
    let mut acc = 0.0;
    for &v in &order {
        let a = w[v] * scale;
        knots_s.push(acc + 0.5 * a);
        knots_v.push(field.values[v]);
        acc += a;
    }
    let profile = RadialProfile::uniform(radius, nodes, |r| {
        let s = PI * r * r;
        let k = knots_s.partition_point(|&x| x < s);
        if k == 0 {
            knots_v[0]
        } else if k == knots_s.len() {
            knots_v[k - 1]
        } else {
            let t = (s - knots_s[k - 1]) / (knots_s[k] - knots_s[k - 1]);
            knots_v[k - 1] + t * (knots_v[k] - knots_v[k - 1])
        }
    });
    let flux = profile.flux_function();
    Ok(RadialProfile { flux: Some(flux), ..profile })
}

/// Area of {β > t} measured with the same lumped-mass weights.
pub fn distribution_function(field: &ScalarField, t: f64) -> f64 {
    let w = crate::fem::lumped_mass(&field.mesh);
    field.values.iter().zip(&w).filter(|(v, _)| **v > t).map(|(_, a)| a).sum()
}

/// S of the disc for a radial β*: 2π∫F(r)²/r dr.
pub fn radial_torsion(profile: &RadialProfile) -> f64 {
    let f = profile.flux_function();
    let r = &profile.radii;
    2.0 * PI * trapezoid(r, |i| if r[i] > 0.0 { f[i] * f[i] / r[i] } else { 0.0 })
}

#[derive(Debug, Clone, Serialize)]
pub struct HoleCalculus {
    /// θʲ: harmonic, 1 on hole j and 0 on the other loops.
    pub theta: Vec<ScalarField>,
    pub m_matrix: Vec<Vec<f64>>,
    pub psi0: ScalarField,
    /// Φ⁰ from the boundary flux identity Φ⁰ᵢ = −∫θⁱβ.
    pub phi0: Vec<f64>,
    /// Φ⁰ as discrete line integrals of ∇⊥ψ⁰.
    pub phi0_circulation: Vec<f64>,
    /// −∫βψ⁰.
    pub s_base: f64,
    #[serde(skip)]
    beta: Vec<f64>,
    #[serde(skip)]
    stiffness: crate::linalg::CsrMatrix<f64>,
    #[serde(skip)]
    mass: crate::linalg::CsrMatrix<f64>,
}

pub fn hole_calculus(domain: &DomainSpec, beta: &Source, mesh_h: f64) -> Result<HoleCalculus> {
    if domain.is_simply_connected() {
        return Err(Error::InvalidDomain("hole_calculus needs at least one hole".into()));
    }
    let mesh = Arc::new(triangulate(domain, mesh_h)?);
    hole_calculus_on_mesh(&mesh, beta)
}

pub fn hole_calculus_on_mesh(mesh: &Arc<TriMesh>, beta: &Source) -> Result<HoleCalculus> {
    use rayon::prelude::*;
    let holes: Vec<BoundaryTag> = mesh.boundary_tags().into_iter().filter(|t| *t != BoundaryTag::Outer).collect();
    if holes.is_empty() {
        return Err(Error::InvalidDomain("hole_calculus needs at least one hole".into()));
    }
    let ops = P1Operators::new(mesh.clone());
    let b = nodal_beta(mesh, beta)?;
    let solver = FactoredPoisson::new(&ops)?;
    let psi0 = solver.solve(&Source::Nodal(b.clone()), &Dirichlet::zero())?;
    let zero = Source::Constant(0.0);
    let theta = holes
        .par_iter()
        .map(|&h| solver.solve(&zero, &Dirichlet::zero().with(h, 1.0)))
        .collect::<Result<Vec<_>>>()?;
    let k = theta.len();
    let mut m_matrix = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i..k {
            let v = ops.stiffness.form(&theta[i].values, &theta[j].values);
            m_matrix[i][j] = v;
            m_matrix[j][i] = v;
        }
    }
    let phi0 = theta.iter().map(|t| -ops.mass.form(&t.values, &b)).collect();
    let phi0_circulation = holes.iter().map(|&h| circulation(mesh, &psi0.values, h)).collect();
    let s_base = -ops.mass.form(&b, &psi0.values);
    Ok(HoleCalculus { theta, m_matrix, psi0, phi0, phi0_circulation, s_base, beta: b, stiffness: ops.stiffness, mass: ops.mass })
}

/// Reading of |M^{−1/2}v|² in the gauge-minimized formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxNorm {
    /// vᵀM⁻¹v (consistent with S = −∫βψ⁰ + CᵀMC under Φ − Φ⁰ = −MC).
    InverseM,
    /// vᵀMv.
    MInner,
}

impl HoleCalculus {
    pub fn holes(&self) -> usize {
        self.theta.len()
    }

    fn m_dense(&self) -> DMatrix<f64> {
        let k = self.holes();
        DMatrix::from_fn(k, k, |i, j| self.m_matrix[i][j])
    }

    /// ψ = ψ⁰ + Σ Cⱼθʲ.
    pub fn psi_for(&self, c: &[f64]) -> Vec<f64> {
        let mut psi = self.psi0.values.clone();
        for (cj, th) in c.iter().zip(&self.theta) {
            for (p, t) in psi.iter_mut().zip(&th.values) {
                *p += cj * t;
            }
        }
        psi
    }

    /// ∫|∇ψ|² for ψ = ψ⁰ + Σ Cⱼθʲ.
    pub fn energy_for(&self, c: &[f64]) -> f64 {
        let psi = self.psi_for(c);
        self.stiffness.form(&psi, &psi)
    }

    /// Φᵢ of ψ⁰ + Σ Cⱼθʲ from the weak flux identity.
    pub fn flux_for(&self, c: &[f64]) -> Vec<f64> {
        let psi = self.psi_for(c);
        let kpsi = self.stiffness.mul_vec(&psi);
        let mb = self.mass.mul_vec(&self.beta);
        self.theta
            .iter()
            .map(|t| -t.values.iter().zip(kpsi.iter().zip(&mb)).map(|(th, (k, m))| th * (k + m)).sum::<f64>())
            .collect()
    }

    /// Circulation Φᵢ of ∇⊥(ψ⁰ + Σ Cⱼθʲ) around each hole.
    pub fn circulation_for(&self, c: &[f64]) -> Vec<f64> {
        let psi = self.psi_for(c);
        let mesh = &self.psi0.mesh;
        (0..self.holes()).map(|i| circulation(mesh, &psi, BoundaryTag::Hole(i))).collect()
    }

    /// Hole constants producing the circulations `target`.
    pub fn constants_for(&self, target: &[f64]) -> Result<Vec<f64>> {
        let chol = self.cholesky()?;
        let rhs = DVector::from_iterator(self.holes(), self.phi0.iter().zip(target).map(|(a, b)| a - b));
        Ok(chol.solve(&rhs).iter().copied().collect())
    }

    fn cholesky(&self) -> Result<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
        self.m_dense().cholesky().ok_or_else(|| Error::Numerical("hole matrix M is not positive definite".into()))
    }

    /// Smallest and largest eigenvalue of M.
    pub fn m_eigen_range(&self) -> (f64, f64) {
        let e = self.m_dense().symmetric_eigenvalues();
        (e.min(), e.max())
    }
}

/// s_base + |M^{−1/2}(Φ − Φ⁰)|² under the chosen reading.
pub fn gauge_minimized_s_with(hc: &HoleCalculus, target_flux: &[f64], norm: FluxNorm) -> Result<f64> {
    if target_flux.len() != hc.holes() {
        return Err(Error::InvalidInput(format!("{} fluxes for {} holes", target_flux.len(), hc.holes())));
    }
    let chol = hc.cholesky()?;
    let v = DVector::from_iterator(hc.holes(), target_flux.iter().zip(&hc.phi0).map(|(a, b)| a - b));
    let q = match norm {
        FluxNorm::InverseM => v.dot(&chol.solve(&v)),
        FluxNorm::MInner => v.dot(&(hc.m_dense() * &v)),
    };
    Ok(hc.s_base + q)
}

pub fn gauge_minimized_s(hc: &HoleCalculus, target_flux: &[f64]) -> Result<f64> {
    gauge_minimized_s_with(hc, target_flux, FluxNorm::InverseM)
}

/// inf over γ ∈ ℤᵏ of the gauge-minimized S at Φ + 2πγ, with the minimizing γ.
pub fn lattice_minimized_s(hc: &HoleCalculus, target_flux: &[f64]) -> Result<(f64, Vec<i64>)> {
    if target_flux.len() != hc.holes() {
        return Err(Error::InvalidInput(format!("{} fluxes for {} holes", target_flux.len(), hc.holes())));
    }
    let v: Vec<f64> = target_flux.iter().zip(&hc.phi0).map(|(p, p0)| p - p0).collect();
    let (q, g) = hc.lattice_quadratic_min(&v)?;
    Ok((hc.s_base + q, g))
}

impl HoleCalculus {
    /// min over γ ∈ ℤᵏ of (v + 2πγ)ᵀM⁻¹(v + 2πγ).
    ///
    /// Starting from the rounded shift with value U, any better γ has
    /// |v + 2πγ|² ≤ λ_max(M)·U, which bounds the enumerated box.
    pub fn lattice_quadratic_min(&self, v: &[f64]) -> Result<(f64, Vec<i64>)> {
        let k = self.holes();
        if k > 4 {
            return Err(Error::InvalidInput(format!("lattice enumeration supports up to 4 holes, got {k}")));
        }
        let chol = self.cholesky()?;
        let tau = 2.0 * PI;
        let q = |g: &[i64]| -> f64 {
            let w = DVector::from_iterator(k, v.iter().zip(g).map(|(x, gi)| x + tau * *gi as f64));
            w.dot(&chol.solve(&w))
        };
        let base: Vec<i64> = v.iter().map(|x| (-x / tau).round() as i64).collect();
        let u = q(&base);
        let (_, lmax) = self.m_eigen_range();
        let radius = ((u.max(0.0) * lmax).sqrt() / tau).ceil() as i64 + 1;
        let side = (2 * radius + 1) as usize;
        let mut best = (u, base.clone());
        let mut g = vec![0i64; k];
        for idx in 0..side.pow(k as u32) {
            let mut rem = idx;
            for (j, gj) in g.iter_mut().enumerate() {
                *gj = base[j] + (rem % side) as i64 - radius;
                rem /= side;
            }
            let val = q(&g);
            if val < best.0 {
                best = (val, g.clone());
            }
        }
        Ok(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::presets;

    #[test]
    fn zero_source_gives_zero() {
        let r = torsion_solve(&presets::disc(1.0), &Source::Constant(0.0), 0.1).unwrap();
        assert_eq!(r.s_omega, 0.0);
        assert!(r.psi.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn negative_beta_rejected() {
        assert!(matches!(torsion_solve(&presets::disc(1.0), &Source::Constant(-1.0), 0.1), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn radial_torsion_closed_forms() {
        let one = RadialProfile::uniform(1.0, RADIAL_NODES, |_| 1.0);
        assert!((radial_torsion(&one) - PI / 8.0).abs() < 1e-7);
        let zero = RadialProfile::uniform(1.0, RADIAL_NODES, |_| 0.0);
        assert_eq!(radial_torsion(&zero), 0.0);
        let cut = 0.5f64.sqrt();
        let step = RadialProfile::uniform(1.0, 1 << 16, |r| if r <= cut { 1.0 } else { 0.0 });
        let exact = PI / 32.0 + PI / 16.0 * 2f64.ln();
        assert!((radial_torsion(&step) - exact).abs() < 1e-4 * exact);
    }

    #[test]
    fn lattice_search_beats_every_nearby_shift() {
        let hc = hole_calculus(&presets::annulus(0.5, None), &Source::Constant(1.0), 0.08).unwrap();
        let phi = [hc.phi0[0] + 17.3];
        let (best, g) = lattice_minimized_s(&hc, &phi).unwrap();
        for d in -20..=20 {
            let v = gauge_minimized_s(&hc, &[phi[0] + 2.0 * PI * d as f64]).unwrap();
            assert!(best <= v + 1e-12, "γ={d}: {v} < {best} (γ*={g:?})");
        }
    }
}
