use super::{covariance, CovarianceMatrix, Matrix, RandomStream, Vector};
use crate::error::{Error, Result};

/// Precomputed square-root factor `L` with `L Lᵀ = K` for repeated draws.
///
/// Uses a Cholesky factor when `K` is positive definite and falls back to
/// `Q · diag(√max(λ, 0))` from the symmetric eigendecomposition otherwise.
#[derive(Debug, Clone)]
pub struct GaussianSampler {
    factor: Matrix,
}

impl GaussianSampler {
    pub fn new(k: &CovarianceMatrix) -> Result<Self> {
        let m = k.as_matrix();
        if let Some(chol) = m.clone().cholesky() {
            return Ok(GaussianSampler { factor: chol.l() });
        }
        covariance::check_psd(m)?;
        let eig = m.clone().symmetric_eigen();
        let mut factor = eig.eigenvectors;
        for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
            let s = lambda.max(0.0).sqrt();
            factor.column_mut(j).scale_mut(s);
        }
        Ok(GaussianSampler { factor })
    }

    pub fn dim(&self) -> usize {
        self.factor.nrows()
    }

    pub fn factor(&self) -> &Matrix {
        &self.factor
    }

    pub fn sample(&self, rng: &mut RandomStream) -> Vector {
        let g = Vector::from_fn(self.dim(), |_, _| rng.standard_normal());
        &self.factor * g
    }
}

/// One draw from `N(0, K)`.
pub fn sample_gaussian_vector(k: &CovarianceMatrix, rng: &mut RandomStream) -> Result<Vector> {
    Ok(GaussianSampler::new(k)?.sample(rng))
}

/// `rows × cols` matrix of independent standard normals, filled row by row so
/// that row `i` is the regressor vector `a_iᵀ`.
pub fn sample_gaussian_matrix(rows: usize, cols: usize, rng: &mut RandomStream) -> Result<Matrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidArgument(format!(
            "gaussian matrix needs positive dimensions, got {rows}x{cols}"
        )));
    }
    Ok(Matrix::from_row_iterator(
        rows,
        cols,
        std::iter::repeat_with(|| rng.standard_normal()).take(rows * cols),
    ))
}
