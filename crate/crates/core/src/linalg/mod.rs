//! Sparse linear algebra used by the finite-element layer: compressed row
//! storage, a fill-reducing LDLᴴ factorization, preconditioned conjugate
//! gradients and a shift-invert block Krylov eigensolver.

mod cg;
mod eigen;
mod ldl;
mod ordering;
mod scalar;
mod sparse;

pub use cg::{pcg_ic0, CgReport};
pub use eigen::{generalized_lowest, EigenOptions, EigenPairs};
pub use ldl::Ldl;
pub use ordering::nested_dissection;
pub use scalar::Scalar;
pub use sparse::{CsrMatrix, TripletBuilder};

/// Unknown count above which `solve_spd` switches from the direct factorization
/// to incomplete-Cholesky preconditioned CG.
pub const DIRECT_SOLVE_LIMIT: usize = 200_000;

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    // conj(a)·b
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + x.conj() * *y)
}

pub(crate) fn norm<T: Scalar>(a: &[T]) -> f64 {
    a.iter().map(|x| x.abs_sqr()).sum::<f64>().sqrt()
}
