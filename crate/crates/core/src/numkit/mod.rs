//! Dense linear algebra and random sampling primitives.
//!
//! Matrices are `nalgebra` dynamic matrices. Everything that needs a
//! covariance goes through [`CovarianceMatrix`], which checks symmetry and
//! positive semidefiniteness once at construction.

mod covariance;
mod gaussian;
mod pinv;
mod rng;

pub use covariance::CovarianceMatrix;
pub use gaussian::{sample_gaussian_matrix, sample_gaussian_vector, GaussianSampler};
pub use pinv::{default_rcond, pseudoinverse};
pub use rng::RandomStream;

use crate::error::{Error, Result};

pub type Matrix = nalgebra::DMatrix<f64>;
pub type Vector = nalgebra::DVector<f64>;

/// Fails with [`Error::InvalidInput`] if any entry is NaN or infinite.
pub fn ensure_finite(m: &Matrix, what: &str) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{what} has non-finite entries")))
    }
}

/// `tr(A B)` without forming the product.
pub fn trace_of_product(a: &Matrix, b: &Matrix) -> f64 {
    debug_assert_eq!(a.ncols(), b.nrows());
    debug_assert_eq!(a.nrows(), b.ncols());
    let mut acc = 0.0;
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Submatrix picking the given rows and columns, in the given order.
pub fn select(m: &Matrix, rows: &[usize], cols: &[usize]) -> Matrix {
    Matrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

/// Columns of `m` at `cols`, in order.
pub fn select_columns(m: &Matrix, cols: &[usize]) -> Matrix {
    Matrix::from_fn(m.nrows(), cols.len(), |i, j| m[(i, cols[j])])
}
