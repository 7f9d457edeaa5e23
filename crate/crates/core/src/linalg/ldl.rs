//! Up-looking sparse LDLᴴ factorization of a Hermitian matrix after a
//! nested-dissection permutation. No pivoting: intended for positive
//! definite shifted systems, with the pivot signs exposed as the inertia.

use super::{nested_dissection, CsrMatrix, Scalar};
use crate::error::{Error, Result};

const NONE: usize = usize::MAX;

#[derive(Debug, Clone)]
pub struct Ldl<T> {
    n: usize,
    perm: Vec<usize>,
    lp: Vec<usize>,
    li: Vec<usize>,
    lx: Vec<T>,
    d: Vec<f64>,
}

impl<T: Scalar> Ldl<T> {
    /// Factor a full (both triangles stored) Hermitian matrix.
    pub fn factor(a: &CsrMatrix<T>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::InvalidInput("LDL requires a square matrix".into()));
        }
        let perm = nested_dissection(n, a.indptr(), a.indices());
        let mut pinv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            pinv[old] = new;
        }

        // Upper triangle of P A Pᵀ in compressed column form.
        let mut ap = vec![0usize; n + 1];
        let mut ai = Vec::with_capacity(a.nnz() / 2 + n);
        let mut ax: Vec<T> = Vec::with_capacity(a.nnz() / 2 + n);
        for k in 0..n {
            let (cols, vals) = a.row(perm[k]);
            for (&j, &v) in cols.iter().zip(vals) {
                let i = pinv[j];
                if i <= k {
                    ai.push(i);
                    ax.push(v.conj());
                }
            }
            ap[k + 1] = ai.len();
        }

        // elimination tree and column counts
        let mut parent = vec![NONE; n];
        let mut flag = vec![NONE; n];
        let mut lnz = vec![0usize; n];
        for k in 0..n {
            flag[k] = k;
            for &i0 in &ai[ap[k]..ap[k + 1]] {
                let mut i = i0;
                if i < k {
                    while flag[i] != k {
                        if parent[i] == NONE {
                            parent[i] = k;
                        }
                        lnz[i] += 1;
                        flag[i] = k;
                        i = parent[i];
                    }
                }
            }
        }
        let mut lp = vec![0usize; n + 1];
        for k in 0..n {
            lp[k + 1] = lp[k] + lnz[k];
        }
        let total = lp[n];
        let mut li = vec![0usize; total];
        let mut lx = vec![T::zero(); total];
        let mut d = vec![0.0f64; n];

        let mut y = vec![T::zero(); n];
        let mut pattern = vec![0usize; n];
        flag.iter_mut().for_each(|f| *f = NONE);
        lnz.iter_mut().for_each(|c| *c = 0);
        let scale = a.max_abs().max(f64::MIN_POSITIVE);
        for k in 0..n {
            y[k] = T::zero();
            let mut top = n;
            flag[k] = k;
            for p in ap[k]..ap[k + 1] {
                let mut i = ai[p];
                y[i] += ax[p];
                let mut len = 0;
                while flag[i] != k {
                    pattern[len] = i;
                    len += 1;
                    flag[i] = k;
                    i = parent[i];
                }
                while len > 0 {
                    top -= 1;
                    len -= 1;
                    pattern[top] = pattern[len];
                }
            }
            let mut dk = y[k].re();
            y[k] = T::zero();
            for &i in &pattern[top..n] {
                let yi = y[i];
                y[i] = T::zero();
                let p2 = lp[i] + lnz[i];
                for p in lp[i]..p2 {
                    let r = li[p];
                    y[r] -= lx[p] * yi;
                }
                let lki = yi.conj().scale(1.0 / d[i]);
                dk -= (lki * yi).re();
                li[p2] = k;
                lx[p2] = lki;
                lnz[i] += 1;
            }
            if !dk.is_finite() || dk.abs() <= 1e-14 * scale {
                return Err(Error::Solve {
                    message: format!("zero pivot at column {k} (d = {dk:e}); matrix is singular"),
                    residual: f64::INFINITY,
                });
            }
            d[k] = dk;
        }
        Ok(Self { n, perm, lp, li, lx, d })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of negative pivots = number of eigenvalues below zero.
    pub fn negative_pivots(&self) -> usize {
        self.d.iter().filter(|&&v| v < 0.0).count()
    }

    pub fn factor_nnz(&self) -> usize {
        self.li.len()
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = vec![T::zero(); self.n];
        self.solve_into(b, &mut x);
        x
    }

    pub fn solve_into(&self, b: &[T], out: &mut [T]) {
        assert_eq!(b.len(), self.n);
        let mut w: Vec<T> = self.perm.iter().map(|&old| b[old]).collect();
        for j in 0..self.n {
            let wj = w[j];
            for p in self.lp[j]..self.lp[j + 1] {
                let r = self.li[p];
                w[r] -= self.lx[p] * wj;
            }
        }
        for (wj, &dj) in w.iter_mut().zip(&self.d) {
            *wj = wj.scale(1.0 / dj);
        }
        for j in (0..self.n).rev() {
            let mut acc = w[j];
            for p in self.lp[j]..self.lp[j + 1] {
                acc -= self.lx[p].conj() * w[self.li[p]];
            }
            w[j] = acc;
        }
        for (k, &old) in self.perm.iter().enumerate() {
            out[old] = w[k];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::TripletBuilder;
    use num_complex::Complex64;

    #[test]
    fn tridiagonal_known_inverse() {
        // [2 -1 0; -1 2 -1; 0 -1 2]^{-1} = 1/4 [3 2 1; 2 4 2; 1 2 3]
        let a = CsrMatrix::from_dense(&[
            vec![2.0, -1.0, 0.0],
            vec![-1.0, 2.0, -1.0],
            vec![0.0, -1.0, 2.0],
        ]);
        let f = Ldl::factor(&a).unwrap();
        let x = f.solve(&[1.0, 0.0, 0.0]);
        assert!((x[0] - 0.75).abs() < 1e-15);
        assert!((x[1] - 0.5).abs() < 1e-15);
        assert!((x[2] - 0.25).abs() < 1e-15);
        assert_eq!(f.negative_pivots(), 0);
    }

    #[test]
    fn inertia_counts_negative_eigenvalues() {
        // diag(1, 2, 3, 4) - 2.5 I has two negative eigenvalues
        let mut t = TripletBuilder::new(4, 4);
        for i in 0..4 {
            t.push(i, i, i as f64 + 1.0 - 2.5);
        }
        let f = Ldl::factor(&t.build()).unwrap();
        assert_eq!(f.negative_pivots(), 2);
    }

    #[test]
    fn complex_hermitian_grid_solve() {
        // 2D magnetic-like Hermitian matrix on a 30x30 grid
        let n = 30;
        let id = |i: usize, j: usize| i * n + j;
        let mut t = TripletBuilder::new(n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                t.push(id(i, j), id(i, j), Complex64::new(4.5, 0.0));
                let phase = Complex64::from_polar(1.0, 0.3 * i as f64);
                if j + 1 < n {
                    t.push(id(i, j), id(i, j + 1), -phase);
                    t.push(id(i, j + 1), id(i, j), -phase.conj());
                }
                if i + 1 < n {
                    t.push(id(i, j), id(i + 1, j), Complex64::new(-1.0, 0.0));
                    t.push(id(i + 1, j), id(i, j), Complex64::new(-1.0, 0.0));
                }
            }
        }
        let a = t.build();
        assert!(a.hermitian_defect() < 1e-15);
        let b: Vec<Complex64> = (0..n * n).map(|k| Complex64::new((k % 7) as f64, (k % 3) as f64)).collect();
        let f = Ldl::factor(&a).unwrap();
        let x = f.solve(&b);
        let r = a.mul_vec(&x);
        let err: f64 = r.iter().zip(&b).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt();
        assert!(err < 1e-11, "residual {err}");
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = CsrMatrix::from_dense(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert!(matches!(Ldl::factor(&a), Err(Error::Solve { .. })));
    }
}
