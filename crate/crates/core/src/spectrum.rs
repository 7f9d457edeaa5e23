//! Lowest eigenvalues of the magnetic Laplacian on a mesh.

use crate::error::{Error, Result};
use crate::fem::{assemble_magnetic, BoundaryCondition, ComplexField, Discretization, VectorPotential};
use crate::geometry::DomainSpec;
use crate::linalg::{generalized_lowest, EigenOptions};
use crate::mesh::{triangulate, TriMesh};
use num_complex::Complex64;
use serde::Serialize;
use std::fmt::Write as _;
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct SpectrumOptions {
    pub n: usize,
    pub tol: f64,
    pub seed: u64,
    pub discretization: Discretization,
    pub max_cycles: usize,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self { n: 1, tol: 1e-8, seed: 0x5eed, discretization: Discretization::default(), max_cycles: 60 }
    }
}

impl SpectrumOptions {
    pub fn with_n(n: usize) -> Self {
        Self { n, ..Default::default() }
    }
}

#[derive(Debug, Clone)]
pub struct EigenResult {
    pub eigenvalues: Vec<f64>,
    /// Mass-orthonormal eigenfunctions (zero on eliminated Dirichlet vertices).
    pub eigenfunctions: Vec<ComplexField>,
    pub b: f64,
    pub bc: BoundaryCondition,
    pub mesh_h: f64,
    pub residuals: Vec<f64>,
    pub discretization: Discretization,
    /// Restart cycles used by the eigensolver.
    pub cycles: usize,
    /// Coefficient vectors on the unknowns, reusable as a warm start.
    pub coefficients: Vec<Vec<Complex64>>,
}

impl EigenResult {
    pub fn lambda1(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn residual_max(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }
}

pub fn solve_spectrum(
    mesh: &Arc<TriMesh>,
    potential: &VectorPotential,
    b: f64,
    bc: BoundaryCondition,
    n: usize,
    tol: f64,
) -> Result<EigenResult> {
    solve_spectrum_with(mesh, potential, b, bc, &SpectrumOptions { n, tol, ..Default::default() }, None)
}

pub fn solve_spectrum_with(
    mesh: &Arc<TriMesh>,
    potential: &VectorPotential,
    b: f64,
    bc: BoundaryCondition,
    opts: &SpectrumOptions,
    warm: Option<&[Vec<Complex64>]>,
) -> Result<EigenResult> {
    if opts.n == 0 {
        return Err(Error::InvalidInput("at least one eigenvalue must be requested".into()));
    }
    if !(1e-12..=1e-4).contains(&opts.tol) {
        return Err(Error::InvalidInput(format!("tolerance {} outside [1e-12, 1e-4]", opts.tol)));
    }
    let sys = assemble_magnetic(mesh, potential, b, bc, opts.discretization)?;
    let eopts = EigenOptions { n: opts.n, tol: opts.tol, max_cycles: opts.max_cycles, seed: opts.seed, basis_size: None };
    let pairs = generalized_lowest(&sys.stiffness, &sys.mass, &eopts, warm)?;
    let eigenfunctions = pairs
        .vectors
        .iter()
        .map(|v| ComplexField::new(mesh.clone(), sys.expand(v)))
        .collect::<Result<Vec<_>>>()?;
    Ok(EigenResult {
        eigenvalues: pairs.values,
        eigenfunctions,
        b,
        bc,
        mesh_h: mesh.h_max,
        residuals: pairs.residuals,
        discretization: opts.discretization,
        cycles: pairs.cycles,
        coefficients: pairs.vectors,
    })
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CurveRow {
    pub b: f64,
    pub eigenvalues: Vec<f64>,
    pub mesh_h: f64,
    pub residual_max: f64,
}

/// One row per field strength, each solve warm-started from the previous one.
pub fn eigenvalue_curve_on(
    mesh: &Arc<TriMesh>,
    potential: &VectorPotential,
    b_grid: &[f64],
    bc: BoundaryCondition,
    opts: &SpectrumOptions,
) -> Result<Vec<CurveRow>> {
    let mut rows = Vec::with_capacity(b_grid.len());
    let mut warm: Option<Vec<Vec<Complex64>>> = None;
    for &b in b_grid {
        let r = solve_spectrum_with(mesh, potential, b, bc, opts, warm.as_deref())
            .map_err(|e| Error::AtField { b, source: Box::new(e) })?;
        rows.push(CurveRow { b, eigenvalues: r.eigenvalues.clone(), mesh_h: r.mesh_h, residual_max: r.residual_max() });
        warm = Some(r.coefficients);
    }
    Ok(rows)
}

pub fn eigenvalue_curve(
    domain: &DomainSpec,
    b_grid: &[f64],
    bc: BoundaryCondition,
    n: usize,
    mesh_h: f64,
) -> Result<Vec<CurveRow>> {
    if b_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput("B grid must be ascending".into()));
    }
    let mesh = Arc::new(triangulate(domain, mesh_h)?);
    eigenvalue_curve_on(&mesh, &VectorPotential::Symmetric, b_grid, bc, &SpectrumOptions::with_n(n))
}

/// CSV with columns B, lambda_1..lambda_n, mesh_h, residual_max.
pub fn curve_csv(rows: &[CurveRow]) -> String {
    let n = rows.iter().map(|r| r.eigenvalues.len()).max().unwrap_or(0);
    let mut s = String::from("B");
    for i in 1..=n {
        let _ = write!(s, ",lambda_{i}");
    }
    s.push_str(",mesh_h,residual_max\n");
    for r in rows {
        let _ = write!(s, "{}", fmt12(r.b));
        for v in &r.eigenvalues {
            let _ = write!(s, ",{}", fmt12(*v));
        }
        let _ = writeln!(s, ",{},{}", fmt12(r.mesh_h), fmt12(r.residual_max));
    }
    s
}

/// Twelve significant digits in scientific notation.
pub fn fmt12(x: f64) -> String {
    format!("{x:.11e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::presets;

    #[test]
    fn zero_field_neumann_has_constant_ground_state() {
        let mesh = Arc::new(triangulate(&presets::ellipse(1.5, 0.8), 0.1).unwrap());
        let r = solve_spectrum(&mesh, &VectorPotential::Symmetric, 0.0, BoundaryCondition::Neumann, 2, 1e-8).unwrap();
        assert!(r.eigenvalues[0].abs() < 1e-8, "{:?}", r.eigenvalues);
        assert!(r.eigenvalues[1] > 0.5);
        let u = &r.eigenfunctions[0].values;
        let ph = u[0] / u[0].norm();
        let spread = u.iter().map(|z| (z / ph - u[0].norm()).norm()).fold(0.0, f64::max);
        assert!(spread < 1e-6, "{spread}");
    }

    #[test]
    fn tolerance_range_is_enforced() {
        let mesh = Arc::new(triangulate(&presets::disc(1.0), 0.3).unwrap());
        assert!(solve_spectrum(&mesh, &VectorPotential::Symmetric, 0.0, BoundaryCondition::Neumann, 1, 1e-3).is_err());
    }

    #[test]
    fn csv_layout() {
        let rows = vec![CurveRow { b: 1.0, eigenvalues: vec![0.5, 1.25], mesh_h: 0.1, residual_max: 1e-9 }];
        let csv = curve_csv(&rows);
        assert_eq!(csv.lines().next().unwrap(), "B,lambda_1,lambda_2,mesh_h,residual_max");
        assert_eq!(csv.lines().nth(1).unwrap(), "1.00000000000e0,5.00000000000e-1,1.25000000000e0,1.00000000000e-1,1.00000000000e-9");
    }
}
