//! Conjugate gradients with a zero-fill incomplete Cholesky preconditioner,
//! used for real SPD systems too large for the direct factorization.

use super::CsrMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgReport {
    pub iterations: usize,
    pub relative_residual: f64,
}

struct Ic0 {
    // lower triangle rows, diagonal last in each row
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<f64>,
}

impl Ic0 {
    fn new(a: &CsrMatrix<f64>) -> Self {
        let mut shift = 0.0;
        loop {
            if let Some(f) = Self::try_factor(a, shift) {
                return f;
            }
            shift = if shift == 0.0 { 1e-3 } else { shift * 4.0 };
        }
    }

    fn try_factor(a: &CsrMatrix<f64>, shift: f64) -> Option<Self> {
        let n = a.nrows();
        let mut indptr = vec![0usize];
        let mut indices = Vec::new();
        let mut data = Vec::new();
        for i in 0..n {
            let (c, v) = a.row(i);
            for (&j, &x) in c.iter().zip(v) {
                if j < i {
                    indices.push(j);
                    data.push(x);
                }
            }
            indices.push(i);
            data.push(a.get(i, i) * (1.0 + shift));
            indptr.push(indices.len());
        }
        for i in 0..n {
            let (start, end) = (indptr[i], indptr[i + 1]);
            for p in start..end {
                let k = indices[p];
                // sparse dot of row i and row k over columns < k
                let (ks, ke) = (indptr[k], indptr[k + 1] - 1);
                let mut s = 0.0;
                let (mut a1, mut b1) = (start, ks);
                while a1 < p && b1 < ke {
                    match indices[a1].cmp(&indices[b1]) {
                        std::cmp::Ordering::Less => a1 += 1,
                        std::cmp::Ordering::Greater => b1 += 1,
                        std::cmp::Ordering::Equal => {
                            s += data[a1] * data[b1];
                            a1 += 1;
                            b1 += 1;
                        }
                    }
                }
                if k < i {
                    data[p] = (data[p] - s) / data[indptr[k + 1] - 1];
                } else {
                    let diag = data[p] - s;
                    if diag <= 0.0 || !diag.is_finite() {
                        return None;
                    }
                    data[p] = diag.sqrt();
                }
            }
        }
        Some(Self { indptr, indices, data })
    }

    fn apply(&self, r: &[f64], z: &mut [f64]) {
        let n = r.len();
        // forward L y = r
        for i in 0..n {
            let (s, e) = (self.indptr[i], self.indptr[i + 1] - 1);
            let mut acc = r[i];
            for p in s..e {
                acc -= self.data[p] * z[self.indices[p]];
            }
            z[i] = acc / self.data[e];
        }
        // backward Lᵀ z = y
        for i in (0..n).rev() {
            let (s, e) = (self.indptr[i], self.indptr[i + 1] - 1);
            z[i] /= self.data[e];
            let zi = z[i];
            for p in s..e {
                z[self.indices[p]] -= self.data[p] * zi;
            }
        }
    }
}

/// Solve `a x = b` for real SPD `a`.
pub fn pcg_ic0(a: &CsrMatrix<f64>, b: &[f64], rel_tol: f64, max_iter: usize) -> Result<(Vec<f64>, CgReport)> {
    let n = b.len();
    let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if bnorm == 0.0 {
        return Ok((vec![0.0; n], CgReport { iterations: 0, relative_residual: 0.0 }));
    }
    let pre = Ic0::new(a);
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z = vec![0.0; n];
    pre.apply(&r, &mut z);
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut ap = vec![0.0; n];
    let mut rel = 1.0;
    for it in 1..=max_iter {
        a.mul_vec_into(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            return Err(Error::Solve { message: "matrix is not positive definite".into(), residual: rel });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        rel = r.iter().map(|v| v * v).sum::<f64>().sqrt() / bnorm;
        if rel <= rel_tol {
            return Ok((x, CgReport { iterations: it, relative_residual: rel }));
        }
        pre.apply(&r, &mut z);
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::Solve { message: format!("CG did not converge in {max_iter} iterations"), residual: rel })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::TripletBuilder;

    #[test]
    fn poisson_grid_converges() {
        let n = 40;
        let id = |i: usize, j: usize| i * n + j;
        let mut t = TripletBuilder::new(n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                t.push(id(i, j), id(i, j), 4.0);
                if i > 0 {
                    t.push(id(i, j), id(i - 1, j), -1.0);
                }
                if i + 1 < n {
                    t.push(id(i, j), id(i + 1, j), -1.0);
                }
                if j > 0 {
                    t.push(id(i, j), id(i, j - 1), -1.0);
                }
                if j + 1 < n {
                    t.push(id(i, j), id(i, j + 1), -1.0);
                }
            }
        }
        let a = t.build();
        let b = vec![1.0; n * n];
        let (x, rep) = pcg_ic0(&a, &b, 1e-10, 500).unwrap();
        assert!(rep.relative_residual <= 1e-10);
        // preconditioning should beat the unpreconditioned O(n) count comfortably
        assert!(rep.iterations < 60, "{} iterations", rep.iterations);
        let r = a.mul_vec(&x);
        let res: f64 = r.iter().zip(&b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        assert!(res / (n as f64) < 1e-9);
    }

    #[test]
    fn identity_returns_rhs() {
        let a = CsrMatrix::<f64>::identity(5);
        let b = vec![1.0, -2.0, 3.0, 0.5, 7.0];
        let (x, _) = pcg_ic0(&a, &b, 1e-12, 10).unwrap();
        for (p, q) in x.iter().zip(&b) {
            assert!((p - q).abs() < 1e-14);
        }
    }
}
