use std::ops::Deref;

use super::Matrix;
use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

/// A symmetric positive semidefinite matrix.
///
/// Symmetry is checked to `1e-12` (relative to the largest entry) and the
/// smallest eigenvalue must be at least `-1e-10` times the largest.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix(Matrix);

impl CovarianceMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidCovariance(format!(
                "covariance must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        super::ensure_finite(&m, "covariance").map_err(|_| {
            Error::InvalidCovariance("covariance has non-finite entries".into())
        })?;
        let scale = m.amax().max(1.0);
        for i in 0..m.nrows() {
            for j in (i + 1)..m.ncols() {
                if (m[(i, j)] - m[(j, i)]).abs() > SYMMETRY_TOL * scale {
                    return Err(Error::InvalidCovariance(format!(
                        "not symmetric at ({i}, {j}): {} vs {}",
                        m[(i, j)],
                        m[(j, i)]
                    )));
                }
            }
        }
        check_psd(&m)?;
        Ok(CovarianceMatrix(m))
    }

    /// Averages `m` with its transpose before validating. Useful for
    /// products like `CᵀC` that are symmetric only up to rounding.
    pub fn symmetrized(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Self::new(m);
        }
        let sym = (&m + m.transpose()) * 0.5;
        Self::new(sym)
    }

    pub fn identity(dim: usize) -> Self {
        CovarianceMatrix(Matrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        CovarianceMatrix(Matrix::zeros(dim, dim))
    }

    pub fn scaled_identity(dim: usize, scale: f64) -> Result<Self> {
        if !(scale >= 0.0 && scale.is_finite()) {
            return Err(Error::InvalidCovariance(format!(
                "scale must be finite and nonnegative, got {scale}"
            )));
        }
        Ok(CovarianceMatrix(Matrix::identity(dim, dim) * scale))
    }

    /// Principal sub-block of an already validated covariance.
    pub(crate) fn principal_block(&self, idx: &[usize]) -> Self {
        CovarianceMatrix(super::select(&self.0, idx, idx))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    /// Exact identity test, used for the closed-form applicability check.
    pub fn is_identity(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| self.0[(i, j)] == if i == j { 1.0 } else { 0.0 }))
    }
}

impl Deref for CovarianceMatrix {
    type Target = Matrix;

    fn deref(&self) -> &Matrix {
        &self.0
    }
}

pub(super) fn check_psd(m: &Matrix) -> Result<()> {
    if m.nrows() == 0 {
        return Ok(());
    }
    let eig = m.clone().symmetric_eigenvalues();
    let max = eig.max();
    let min = eig.min();
    if min < -PSD_TOL * max.max(0.0) {
        return Err(Error::InvalidCovariance(format!(
            "matrix is indefinite: smallest eigenvalue {min:e}, largest {max:e}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_asymmetric() {
        let m = Matrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0]);
        assert!(matches!(
            CovarianceMatrix::new(m),
            Err(Error::InvalidCovariance(_))
        ));
    }

    #[test]
    fn rejects_indefinite() {
        let m = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(
            CovarianceMatrix::new(m),
            Err(Error::InvalidCovariance(_))
        ));
    }

    #[test]
    fn accepts_singular_and_empty() {
        let m = Matrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(CovarianceMatrix::new(m).is_ok());
        assert!(CovarianceMatrix::new(Matrix::zeros(0, 0)).is_ok());
        assert!(CovarianceMatrix::new(Matrix::zeros(3, 3)).is_ok());
    }

    #[test]
    fn identity_detection() {
        assert!(CovarianceMatrix::identity(4).is_identity());
        assert!(!CovarianceMatrix::scaled_identity(4, 2.0).unwrap().is_identity());
    }
}
