use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Field abstraction shared by the real Poisson and complex magnetic solvers.
pub trait Scalar:
    Copy
    + Debug
    + Default
    + Send
    + Sync
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + 'static
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_real(x: f64) -> Self;
    fn conj(self) -> Self;
    fn re(self) -> f64;
    fn im(self) -> f64;
    fn abs_sqr(self) -> f64;
    fn abs(self) -> f64 {
        self.abs_sqr().sqrt()
    }
    fn scale(self, s: f64) -> Self {
        self * Self::from_real(s)
    }
    fn is_finite(self) -> bool;
    /// Builds a value from real and imaginary parts; real fields drop `im`.
    fn from_parts(re: f64, im: f64) -> Self;
    /// Lowest eigenpairs of a small dense Hermitian matrix given row-major,
    /// eigenvalues ascending, eigenvectors as columns (row-major output).
    fn dense_hermitian_eig(h: &[Self], m: usize) -> (Vec<f64>, Vec<Self>);
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn conj(self) -> Self {
        self
    }
    fn re(self) -> f64 {
        self
    }
    fn im(self) -> f64 {
        0.0
    }
    fn abs_sqr(self) -> f64 {
        self * self
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn from_parts(re: f64, _im: f64) -> Self {
        re
    }
    fn dense_hermitian_eig(h: &[Self], m: usize) -> (Vec<f64>, Vec<Self>) {
        let mat = DMatrix::from_row_slice(m, m, h);
        let mat = (&mat + mat.transpose()) * 0.5;
        sorted_eig(SymmetricEigen::new(mat), m)
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn im(self) -> f64 {
        self.im
    }
    fn abs_sqr(self) -> f64 {
        self.norm_sqr()
    }
    fn scale(self, s: f64) -> Self {
        Complex64::new(self.re * s, self.im * s)
    }
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn from_parts(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }
    fn dense_hermitian_eig(h: &[Self], m: usize) -> (Vec<f64>, Vec<Self>) {
        let mat = DMatrix::from_row_slice(m, m, h);
        let mat = (&mat + mat.adjoint()).scale(0.5);
        sorted_eig(SymmetricEigen::new(mat), m)
    }
}

fn sorted_eig<T: nalgebra::ComplexField<RealField = f64> + Copy>(
    eig: SymmetricEigen<T, nalgebra::Dyn>,
    m: usize,
) -> (Vec<f64>, Vec<T>) {
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = Vec::with_capacity(m * m);
    for r in 0..m {
        for &c in &order {
            vecs.push(eig.eigenvectors[(r, c)]);
        }
    }
    (values, vecs)
}
