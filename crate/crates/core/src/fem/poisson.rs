//! Real Poisson problems Δψ = β with per-component Dirichlet constants.
//!
//! Sign convention: the assembled matrix is the P1 stiffness of −Δ, so the
//! right-hand side is −Mβ (β interpolated nodally).

use super::{mass_matrix, stiffness_matrix, ScalarField};
use crate::error::{Error, Result};
use crate::geometry::{BoundaryTag, Point};
use crate::linalg::{pcg_ic0, CsrMatrix, Ldl, DIRECT_SOLVE_LIMIT};
use crate::mesh::TriMesh;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Source term β.
#[derive(Clone)]
pub enum Source {
    Constant(f64),
    Nodal(Vec<f64>),
    Function(Arc<dyn Fn(Point) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for Source {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Source::Constant(c) => write!(f, "Constant({c})"),
            Source::Nodal(v) => write!(f, "Nodal({} values)", v.len()),
            Source::Function(_) => write!(f, "Function"),
        }
    }
}

impl Source {
    pub fn function(f: impl Fn(Point) -> f64 + Send + Sync + 'static) -> Self {
        Source::Function(Arc::new(f))
    }

    pub fn nodal_values(&self, mesh: &TriMesh) -> Result<Vec<f64>> {
        let v = match self {
            Source::Constant(c) => vec![*c; mesh.vertex_count()],
            Source::Nodal(v) => {
                if v.len() != mesh.vertex_count() {
                    return Err(Error::InvalidInput(format!("source has {} values for {} vertices", v.len(), mesh.vertex_count())));
                }
                v.clone()
            }
            Source::Function(f) => mesh.vertices.iter().map(|&p| f(p)).collect(),
        };
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("source is not finite on the mesh".into()));
        }
        Ok(v)
    }
}

/// Boundary data: a constant per boundary component.
#[derive(Debug, Clone, Default)]
pub struct Dirichlet {
    pub values: BTreeMap<BoundaryTag, f64>,
}

impl Dirichlet {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn with(mut self, tag: BoundaryTag, value: f64) -> Self {
        self.values.insert(tag, value);
        self
    }

    pub fn value(&self, tag: BoundaryTag) -> f64 {
        self.values.get(&tag).copied().unwrap_or(0.0)
    }
}

/// Full P1 stiffness and mass matrices of a mesh.
#[derive(Debug, Clone)]
pub struct P1Operators {
    pub mesh: Arc<TriMesh>,
    pub stiffness: CsrMatrix<f64>,
    pub mass: CsrMatrix<f64>,
    free: Vec<usize>,
    tags: Vec<Option<BoundaryTag>>,
}

impl P1Operators {
    pub fn new(mesh: Arc<TriMesh>) -> Self {
        let stiffness = stiffness_matrix(&mesh);
        let mass = mass_matrix(&mesh);
        let tags = mesh.vertex_tags();
        let free = (0..mesh.vertex_count()).filter(|&v| tags[v].is_none()).collect();
        Self { mesh, stiffness, mass, free, tags }
    }

    /// Interior vertex indices.
    pub fn free(&self) -> &[usize] {
        &self.free
    }
}

/// Reduced system on interior vertices.
#[derive(Debug, Clone)]
pub struct PoissonSystem {
    pub matrix: CsrMatrix<f64>,
    pub rhs: Vec<f64>,
    /// Interior vertex of each unknown.
    pub free: Vec<usize>,
    /// Full-length vector carrying the boundary values.
    pub lifted: Vec<f64>,
    mesh: Arc<TriMesh>,
}

fn lifted_and_rhs(ops: &P1Operators, beta: &[f64], dirichlet: &Dirichlet) -> (Vec<f64>, Vec<f64>) {
    let n = ops.mesh.vertex_count();
    let mut g = vec![0.0; n];
    for (v, tag) in ops.tags.iter().enumerate() {
        if let Some(t) = tag {
            g[v] = dirichlet.value(*t);
        }
    }
    let mb = ops.mass.mul_vec(beta);
    let kg = ops.stiffness.mul_vec(&g);
    let rhs = ops.free.iter().map(|&i| -mb[i] - kg[i]).collect();
    (g, rhs)
}

pub fn assemble_poisson(ops: &P1Operators, source: &Source, dirichlet: &Dirichlet) -> Result<PoissonSystem> {
    if ops.free.len() == ops.mesh.vertex_count() {
        return Err(Error::Solve { message: "no Dirichlet vertices: Poisson system is singular".into(), residual: f64::NAN });
    }
    let beta = source.nodal_values(&ops.mesh)?;
    let (lifted, rhs) = lifted_and_rhs(ops, &beta, dirichlet);
    Ok(PoissonSystem { matrix: ops.stiffness.principal_submatrix(&ops.free), rhs, free: ops.free.clone(), lifted, mesh: ops.mesh.clone() })
}

impl PoissonSystem {
    pub fn expand(&self, interior: &[f64]) -> Vec<f64> {
        let mut full = self.lifted.clone();
        for (&v, &x) in self.free.iter().zip(interior) {
            full[v] = x;
        }
        full
    }

    pub fn solve(&self) -> Result<ScalarField> {
        let x = solve_spd(&self.matrix, &self.rhs)?;
        ScalarField::new(self.mesh.clone(), self.expand(&x))
    }
}

fn relative_residual(a: &CsrMatrix<f64>, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.mul_vec(x);
    let r: f64 = ax.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if nb == 0.0 {
        r
    } else {
        r / nb
    }
}

/// Symmetric positive definite solve to relative residual ≤ 1e-10: sparse
/// LDLᵀ with iterative refinement, or IC(0)-preconditioned CG above
/// [`DIRECT_SOLVE_LIMIT`] unknowns.
pub fn solve_spd(matrix: &CsrMatrix<f64>, rhs: &[f64]) -> Result<Vec<f64>> {
    if matrix.nrows() != rhs.len() {
        return Err(Error::InvalidInput(format!("matrix of size {} with rhs of length {}", matrix.nrows(), rhs.len())));
    }
    if matrix.nrows() > DIRECT_SOLVE_LIMIT {
        let (x, report) = pcg_ic0(matrix, rhs, 1e-11, 20_000)?;
        if report.relative_residual > 1e-10 {
            return Err(Error::Solve { message: "conjugate gradients did not converge".into(), residual: report.relative_residual });
        }
        return Ok(x);
    }
    let ldl = Ldl::factor(matrix)?;
    if ldl.negative_pivots() > 0 {
        return Err(Error::Solve { message: "matrix is not positive definite".into(), residual: f64::NAN });
    }
    refine_solve(matrix, &ldl, rhs)
}

pub(crate) fn refine_solve(matrix: &CsrMatrix<f64>, ldl: &Ldl<f64>, rhs: &[f64]) -> Result<Vec<f64>> {
    let mut x = ldl.solve(rhs);
    let mut res = relative_residual(matrix, &x, rhs);
    for _ in 0..3 {
        if res <= 1e-12 {
            break;
        }
        let ax = matrix.mul_vec(&x);
        let r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let dx = ldl.solve(&r);
        x.iter_mut().zip(&dx).for_each(|(a, b)| *a += b);
        res = relative_residual(matrix, &x, rhs);
    }
    if !(res <= 1e-10) {
        return Err(Error::Solve { message: "direct solve residual above 1e-10".into(), residual: res });
    }
    Ok(x)
}

/// Factor-once Dirichlet solver for repeated Poisson solves on one mesh.
pub struct FactoredPoisson<'a> {
    ops: &'a P1Operators,
    matrix: CsrMatrix<f64>,
    ldl: Option<Ldl<f64>>,
}

impl<'a> FactoredPoisson<'a> {
    pub fn new(ops: &'a P1Operators) -> Result<Self> {
        if ops.free.len() == ops.mesh.vertex_count() {
            return Err(Error::Solve { message: "no Dirichlet vertices: Poisson system is singular".into(), residual: f64::NAN });
        }
        let matrix = ops.stiffness.principal_submatrix(&ops.free);
        let ldl = if matrix.nrows() <= DIRECT_SOLVE_LIMIT { Some(Ldl::factor(&matrix)?) } else { None };
        Ok(Self { ops, matrix, ldl })
    }

    pub fn solve(&self, source: &Source, dirichlet: &Dirichlet) -> Result<ScalarField> {
        let beta = source.nodal_values(&self.ops.mesh)?;
        let (lifted, rhs) = lifted_and_rhs(self.ops, &beta, dirichlet);
        let x = match &self.ldl {
            Some(l) => refine_solve(&self.matrix, l, &rhs)?,
            None => solve_spd(&self.matrix, &rhs)?,
        };
        let mut full = lifted;
        for (&v, &xi) in self.ops.free.iter().zip(&x) {
            full[v] = xi;
        }
        ScalarField::new(self.ops.mesh.clone(), full)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::presets;
    use crate::mesh::triangulate;

    #[test]
    fn disc_torsion_function() {
        let mesh = Arc::new(triangulate(&presets::disc(1.0), 0.05).unwrap());
        let ops = P1Operators::new(mesh.clone());
        let sys = assemble_poisson(&ops, &Source::Constant(1.0), &Dirichlet::zero()).unwrap();
        let psi = sys.solve().unwrap();
        let err = mesh
            .vertices
            .iter()
            .zip(&psi.values)
            .map(|(p, v)| (v - (p[0] * p[0] + p[1] * p[1] - 1.0) / 4.0).abs())
            .fold(0.0, f64::max);
        assert!(err < 2e-3, "{err}");
    }

    #[test]
    fn zero_source_gives_zero() {
        let mesh = Arc::new(triangulate(&presets::disc(1.0), 0.2).unwrap());
        let ops = P1Operators::new(mesh);
        let psi = assemble_poisson(&ops, &Source::Constant(0.0), &Dirichlet::zero()).unwrap().solve().unwrap();
        assert!(psi.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn boundary_constants_are_imposed() {
        let mesh = Arc::new(triangulate(&presets::annulus(0.5, Some(1.0)), 0.05).unwrap());
        let ops = P1Operators::new(mesh.clone());
        let f = FactoredPoisson::new(&ops).unwrap();
        let theta = f.solve(&Source::Constant(0.0), &Dirichlet::zero().with(BoundaryTag::Hole(0), 1.0)).unwrap();
        for (p, v) in mesh.vertices.iter().zip(&theta.values) {
            let exact = (1.0 / p[0].hypot(p[1])).ln() / 2f64.ln();
            assert!((v - exact).abs() < 2e-3);
        }
    }

    #[test]
    fn small_known_systems() {
        let id = CsrMatrix::<f64>::identity(4);
        assert_eq!(solve_spd(&id, &[1.0, 2.0, 3.0, 4.0]).unwrap(), vec![1.0, 2.0, 3.0, 4.0]);
        let a = CsrMatrix::from_dense(&[vec![2.0, -1.0, 0.0], vec![-1.0, 2.0, -1.0], vec![0.0, -1.0, 2.0]]);
        // inverse is [[3,2,1],[2,4,2],[1,2,3]]/4
        let x = solve_spd(&a, &[1.0, 0.0, 0.0]).unwrap();
        for (xi, e) in x.iter().zip([0.75, 0.5, 0.25]) {
            assert!((xi - e).abs() < 1e-15);
        }
    }
}
