use super::Scalar;
use std::io::Write;

/// Accumulates `(row, col, value)` contributions; duplicates are summed on build.
#[derive(Debug, Clone)]
pub struct TripletBuilder<T> {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, T)>,
}

impl<T: Scalar> TripletBuilder<T> {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, entries: Vec::new() }
    }

    pub fn with_capacity(nrows: usize, ncols: usize, cap: usize) -> Self {
        Self { nrows, ncols, entries: Vec::with_capacity(cap) }
    }

    pub fn push(&mut self, row: usize, col: usize, value: T) {
        debug_assert!(row < self.nrows && col < self.ncols);
        self.entries.push((row, col, value));
    }

    pub fn extend(&mut self, other: TripletBuilder<T>) {
        self.entries.extend(other.entries);
    }

    pub fn build(mut self) -> CsrMatrix<T> {
        self.entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; self.nrows + 1];
        let mut indices = Vec::with_capacity(self.entries.len());
        let mut data: Vec<T> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in self.entries {
            if last == Some((r, c)) {
                *data.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                data.push(v);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..self.nrows {
            indptr[i + 1] += indptr[i];
        }
        CsrMatrix { nrows: self.nrows, ncols: self.ncols, indptr, indices, data }
    }
}

/// Compressed sparse row matrix with sorted column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<T>,
}

impl<T: Scalar> CsrMatrix<T> {
    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            data: vec![T::one(); n],
        }
    }

    pub fn from_dense(rows: &[Vec<T>]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        let mut b = TripletBuilder::new(n, m);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != T::zero() {
                    b.push(i, j, v);
                }
            }
        }
        b.build()
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[T]) {
        let r = self.indptr[i]..self.indptr[i + 1];
        (&self.indices[r.clone()], &self.data[r])
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(p) => vals[p],
            Err(_) => T::zero(),
        }
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec_into(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = T::zero();
            for p in self.indptr[i]..self.indptr[i + 1] {
                acc += self.data[p] * x[self.indices[p]];
            }
            *yi = acc;
        }
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.nrows];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `conj(x)ᵀ A y`.
    pub fn form(&self, x: &[T], y: &[T]) -> T {
        let ay = self.mul_vec(y);
        super::dot(x, &ay)
    }

    /// Linear combination `a·self + b·other` (same shape).
    pub fn axpby(&self, a: T, other: &CsrMatrix<T>, b: T) -> CsrMatrix<T> {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut t = TripletBuilder::with_capacity(self.nrows, self.ncols, self.nnz() + other.nnz());
        for i in 0..self.nrows {
            let (c, v) = self.row(i);
            for (&j, &x) in c.iter().zip(v) {
                t.push(i, j, a * x);
            }
            let (c, v) = other.row(i);
            for (&j, &x) in c.iter().zip(v) {
                t.push(i, j, b * x);
            }
        }
        t.build()
    }

    /// Principal submatrix on the given (sorted or unsorted) index list.
    pub fn principal_submatrix(&self, keep: &[usize]) -> CsrMatrix<T> {
        let mut map = vec![usize::MAX; self.ncols];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let mut t = TripletBuilder::with_capacity(keep.len(), keep.len(), self.nnz());
        for (new_i, &old_i) in keep.iter().enumerate() {
            let (c, v) = self.row(old_i);
            for (&j, &x) in c.iter().zip(v) {
                if map[j] != usize::MAX {
                    t.push(new_i, map[j], x);
                }
            }
        }
        t.build()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// max |A_ij − conj(A_ji)| relative to max |A_ij|.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut worst: f64 = 0.0;
        for i in 0..self.nrows {
            let (c, v) = self.row(i);
            for (&j, &x) in c.iter().zip(v) {
                worst = worst.max((x - self.get(j, i).conj()).abs());
            }
        }
        worst / scale
    }

    pub fn row_sums(&self) -> Vec<T> {
        (0..self.nrows).map(|i| self.row(i).1.iter().fold(T::zero(), |a, &b| a + b)).collect()
    }

    pub fn indptr(&self) -> &[usize] {
        &self.indptr
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[T] {
        &self.data
    }

    /// Matrix Market coordinate dump (general storage) for debugging.
    pub fn write_matrix_market<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let complex = std::any::TypeId::of::<T>() != std::any::TypeId::of::<f64>();
        let field = if complex { "complex" } else { "real" };
        writeln!(w, "%%MatrixMarket matrix coordinate {field} general")?;
        writeln!(w, "{} {} {}", self.nrows, self.ncols, self.nnz())?;
        for i in 0..self.nrows {
            let (c, v) = self.row(i);
            for (&j, &x) in c.iter().zip(v) {
                if complex {
                    writeln!(w, "{} {} {:e} {:e}", i + 1, j + 1, x.re(), x.im())?;
                } else {
                    writeln!(w, "{} {} {:e}", i + 1, j + 1, x.re())?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn duplicates_are_summed() {
        let mut t = TripletBuilder::new(2, 2);
        t.push(0, 0, 1.0);
        t.push(0, 0, 2.0);
        t.push(1, 0, -1.0);
        let a = t.build();
        assert_eq!(a.get(0, 0), 3.0);
        assert_eq!(a.get(1, 0), -1.0);
        assert_eq!(a.get(1, 1), 0.0);
        assert_eq!(a.nnz(), 2);
    }

    #[test]
    fn hermitian_defect_detects_asymmetry() {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let h = CsrMatrix::from_dense(&[vec![one, i], vec![-i, one]]);
        assert!(h.hermitian_defect() < 1e-15);
        let nh = CsrMatrix::from_dense(&[vec![one, i], vec![i, one]]);
        assert!(nh.hermitian_defect() > 1.0);
    }

    #[test]
    fn matrix_market_header() {
        let a = CsrMatrix::<f64>::identity(3);
        let mut buf = Vec::new();
        a.write_matrix_market(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("%%MatrixMarket matrix coordinate real general\n3 3 3\n"));
    }
}
