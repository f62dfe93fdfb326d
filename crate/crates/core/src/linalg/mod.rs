//! Sparse and small dense symmetric linear algebra used by the method.

mod cg;
mod dense;
mod gram_schmidt;
mod sparse;
mod spectrum;

pub use cg::{cg_shifted_solve, pcg, CG_MIN_ITERATIONS};
pub use dense::{cholesky_lower, mat_pow_s, quad_form_pow, sym_eig, DenseSymMatrix, EigenDecomposition};
pub use gram_schmidt::{gram_schmidt_m, MOrthonormalBasis};
pub use sparse::SparseSymMatrix;
pub use spectrum::{lambda_max_estimate, lambda_min_estimate, SAFETY_FACTOR};

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
