//! P1 finite elements: nodal fields, element geometry, assembly and solves.

pub mod magnetic;
pub mod poisson;
pub mod quadrature;

pub use magnetic::{assemble_magnetic, BoundaryCondition, Discretization, GradientGauge, MagneticSystem, VectorPotential};
pub use magnetic::StreamPotential;
pub use poisson::{assemble_poisson, solve_spd, Dirichlet, FactoredPoisson, P1Operators, PoissonSystem, Source};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::linalg::{CsrMatrix, TripletBuilder};
use crate::mesh::TriMesh;
use num_complex::Complex64;
use rayon::prelude::*;
use std::sync::Arc;

/// Area and barycentric gradients of one triangle.
#[derive(Debug, Clone, Copy)]
pub struct Element {
    pub nodes: [usize; 3],
    pub area: f64,
    pub grads: [[f64; 2]; 3],
    pub points: [Point; 3],
}

impl Element {
    pub fn new(mesh: &TriMesh, t: usize) -> Self {
        let nodes = mesh.triangles[t];
        let p = [mesh.vertices[nodes[0]], mesh.vertices[nodes[1]], mesh.vertices[nodes[2]]];
        let det = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
        let mut grads = [[0.0; 2]; 3];
        for k in 0..3 {
            let (a, b) = (p[(k + 1) % 3], p[(k + 2) % 3]);
            grads[k] = [(a[1] - b[1]) / det, (b[0] - a[0]) / det];
        }
        Element { nodes, area: 0.5 * det, grads, points: p }
    }

    pub fn point_at(&self, l: [f64; 3]) -> Point {
        [
            l[0] * self.points[0][0] + l[1] * self.points[1][0] + l[2] * self.points[2][0],
            l[0] * self.points[0][1] + l[1] * self.points[1][1] + l[2] * self.points[2][1],
        ]
    }

    pub fn centroid(&self) -> Point {
        self.point_at([1.0 / 3.0; 3])
    }

    /// Gradient of the P1 interpolant of nodal `values`.
    pub fn gradient(&self, values: &[f64]) -> [f64; 2] {
        let mut g = [0.0; 2];
        for k in 0..3 {
            let v = values[self.nodes[k]];
            g[0] += v * self.grads[k][0];
            g[1] += v * self.grads[k][1];
        }
        g
    }
}

pub fn elements(mesh: &TriMesh) -> Vec<Element> {
    (0..mesh.triangles.len()).map(|t| Element::new(mesh, t)).collect()
}

/// Assembles element contributions in parallel, one triplet buffer per worker.
pub(crate) fn assemble<T, F>(mesh: &TriMesh, n: usize, local: F) -> CsrMatrix<T>
where
    T: crate::linalg::Scalar,
    F: Fn(&Element) -> [[T; 3]; 3] + Sync,
{
    let buffers: Vec<TripletBuilder<T>> = (0..mesh.triangles.len())
        .into_par_iter()
        .fold(
            || TripletBuilder::new(n, n),
            |mut acc, t| {
                let e = Element::new(mesh, t);
                let a = local(&e);
                for i in 0..3 {
                    for j in 0..3 {
                        acc.push(e.nodes[i], e.nodes[j], a[i][j]);
                    }
                }
                acc
            },
        )
        .collect();
    let mut all = TripletBuilder::new(n, n);
    for b in buffers {
        all.extend(b);
    }
    all.build()
}

/// P1 stiffness ∫∇φ_i·∇φ_j.
pub fn stiffness_matrix(mesh: &TriMesh) -> CsrMatrix<f64> {
    assemble(mesh, mesh.vertex_count(), |e| {
        let mut a = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] = e.area * (e.grads[i][0] * e.grads[j][0] + e.grads[i][1] * e.grads[j][1]);
            }
        }
        a
    })
}

/// P1 mass ∫φ_iφ_j.
pub fn mass_matrix(mesh: &TriMesh) -> CsrMatrix<f64> {
    assemble(mesh, mesh.vertex_count(), |e| {
        let mut a = [[e.area / 12.0; 3]; 3];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = e.area / 6.0;
        }
        a
    })
}

/// Row sums of the mass matrix (nodal areas).
pub fn lumped_mass(mesh: &TriMesh) -> Vec<f64> {
    let mut w = vec![0.0; mesh.vertex_count()];
    for t in 0..mesh.triangles.len() {
        let a = mesh.triangle_area(t) / 3.0;
        for &v in &mesh.triangles[t] {
            w[v] += a;
        }
    }
    w
}

fn check_finite<T: crate::linalg::Scalar>(values: &[T]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numerical("field contains NaN or infinite values".into()))
    }
}

/// Real nodal field.
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub mesh: Arc<TriMesh>,
    pub values: Vec<f64>,
}

/// Complex nodal field.
#[derive(Debug, Clone)]
pub struct ComplexField {
    pub mesh: Arc<TriMesh>,
    pub values: Vec<Complex64>,
}

impl ScalarField {
    pub fn new(mesh: Arc<TriMesh>, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.vertex_count() {
            return Err(Error::InvalidInput(format!("{} values for {} vertices", values.len(), mesh.vertex_count())));
        }
        check_finite(&values)?;
        Ok(Self { mesh, values })
    }

    pub fn from_fn(mesh: Arc<TriMesh>, f: impl Fn(Point) -> f64) -> Result<Self> {
        let values = mesh.vertices.iter().map(|&p| f(p)).collect();
        Self::new(mesh, values)
    }

    pub fn constant(mesh: Arc<TriMesh>, c: f64) -> Self {
        let n = mesh.vertex_count();
        Self { mesh, values: vec![c; n] }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

impl serde::Serialize for ScalarField {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.values.serialize(s)
    }
}

impl ComplexField {
    pub fn new(mesh: Arc<TriMesh>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != mesh.vertex_count() {
            return Err(Error::InvalidInput(format!("{} values for {} vertices", values.len(), mesh.vertex_count())));
        }
        check_finite(&values)?;
        Ok(Self { mesh, values })
    }
}

/// Integrand selector for [`integrate`].
#[derive(Clone, Copy)]
pub enum Integrand<'a> {
    Value,
    GradSquared,
    AbsSquared,
    /// Product with another nodal P1 function.
    ProductNodal(&'a [f64]),
    /// Product with an arbitrary function, by degree-4 quadrature.
    ProductFn(&'a (dyn Fn(Point) -> f64 + Sync)),
}

pub enum FieldRef<'a> {
    Real(&'a ScalarField),
    Complex(&'a ComplexField),
}

/// Integral over the mesh; exact for P1 data in all but the `ProductFn` case.
/// For complex fields `Value` and products return the real part.
pub fn integrate(field: FieldRef<'_>, kind: Integrand<'_>) -> f64 {
    let mesh = match &field {
        FieldRef::Real(f) => &f.mesh,
        FieldRef::Complex(f) => &f.mesh,
    };
    let mut total = 0.0;
    for t in 0..mesh.triangles.len() {
        let e = Element::new(mesh, t);
        let u = |k: usize| -> Complex64 {
            match &field {
                FieldRef::Real(f) => Complex64::new(f.values[e.nodes[k]], 0.0),
                FieldRef::Complex(f) => f.values[e.nodes[k]],
            }
        };
        let uk = [u(0), u(1), u(2)];
        total += match kind {
            Integrand::Value => e.area * (uk[0] + uk[1] + uk[2]).re / 3.0,
            Integrand::GradSquared => {
                let mut g = [Complex64::new(0.0, 0.0); 2];
                for k in 0..3 {
                    g[0] += uk[k] * e.grads[k][0];
                    g[1] += uk[k] * e.grads[k][1];
                }
                e.area * (g[0].norm_sqr() + g[1].norm_sqr())
            }
            Integrand::AbsSquared => {
                let mut s = 0.0;
                for i in 0..3 {
                    for j in 0..3 {
                        let m = if i == j { 1.0 / 6.0 } else { 1.0 / 12.0 };
                        s += m * (uk[i].conj() * uk[j]).re;
                    }
                }
                e.area * s
            }
            Integrand::ProductNodal(g) => {
                let mut s = 0.0;
                for i in 0..3 {
                    for j in 0..3 {
                        let m = if i == j { 1.0 / 6.0 } else { 1.0 / 12.0 };
                        s += m * uk[i].re * g[e.nodes[j]];
                    }
                }
                e.area * s
            }
            Integrand::ProductFn(f) => quadrature::DUNAVANT6
                .iter()
                .map(|(l, w)| {
                    let v = l[0] * uk[0].re + l[1] * uk[1].re + l[2] * uk[2].re;
                    w * v * f(e.point_at(*l))
                })
                .sum::<f64>()
                * e.area,
        };
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::presets;
    use crate::mesh::triangulate;

    #[test]
    fn mass_row_sums_equal_area() {
        let m = triangulate(&presets::ellipse(2.0, 0.5), 0.1).unwrap();
        let mass = mass_matrix(&m);
        let total: f64 = mass.row_sums().iter().sum();
        assert!((total - m.total_area()).abs() < 1e-12 * total);
        assert!(mass.hermitian_defect() < 1e-14);
    }

    #[test]
    fn stiffness_annihilates_constants_and_linears() {
        let m = triangulate(&presets::disc(1.0), 0.2).unwrap();
        let k = stiffness_matrix(&m);
        let ones = vec![1.0; m.vertex_count()];
        assert!(k.mul_vec(&ones).iter().all(|v| v.abs() < 1e-12));
        let x: Vec<f64> = m.vertices.iter().map(|p| p[0]).collect();
        // ∫|∇x|² = area
        assert!((k.form(&x, &x) - m.total_area()).abs() < 1e-12);
    }

    #[test]
    fn integrate_constant_on_unit_area() {
        let d = presets::with_area(&presets::disc(1.0), 1.0).unwrap();
        let mesh = Arc::new(triangulate(&d, 0.05).unwrap());
        let one = ScalarField::constant(mesh.clone(), 1.0);
        let v = integrate(FieldRef::Real(&one), Integrand::Value);
        assert!((v - mesh.total_area()).abs() < 1e-13);
        assert!((v - 1.0).abs() < 3e-3);
        let sq = integrate(FieldRef::Real(&one), Integrand::AbsSquared);
        assert!((sq - v).abs() < 1e-13);
        let f = |p: Point| p[0] * p[0];
        let x2 = integrate(FieldRef::Real(&one), Integrand::ProductFn(&f));
        assert!((x2 - 1.0 / (4.0 * std::f64::consts::PI)).abs() < 1e-3);
    }
}
