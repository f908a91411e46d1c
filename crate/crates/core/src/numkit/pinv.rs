use super::Matrix;
use crate::error::{Error, Result};

/// Default relative cutoff: `max(rows, cols) · ε`.
pub fn default_rcond(rows: usize, cols: usize) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON
}

/// Moore-Penrose pseudoinverse through the SVD.
///
/// Singular values at or below `rcond · σ_max` are treated as zero. `None`
/// selects [`default_rcond`].
pub fn pseudoinverse(m: &Matrix, rcond: Option<f64>) -> Result<Matrix> {
    let (rows, cols) = m.shape();
    super::ensure_finite(m, "pseudoinverse input")?;
    let rcond = rcond.unwrap_or_else(|| default_rcond(rows, cols));
    if !(rcond >= 0.0 && rcond.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "rcond must be finite and nonnegative, got {rcond}"
        )));
    }
    if rows == 0 || cols == 0 {
        return Ok(Matrix::zeros(cols, rows));
    }

    // faer's SVD: nalgebra 0.35 returns wrong singular values for some
    // rank-deficient inputs, which are exactly the Gram matrices this crate
    // inverts. Built without rayon, so it is sequential and deterministic.
    let fm = faer::Mat::<f64>::from_fn(rows, cols, |i, j| m[(i, j)]);
    let svd = fm
        .thin_svd()
        .map_err(|e| Error::Numerical(format!("SVD of {rows}x{cols} matrix failed: {e:?}")))?;
    let (u, v) = (svd.U(), svd.V());
    let sigma = svd.S().column_vector();
    let k = rows.min(cols);

    let sigma_max = (0..k).map(|i| sigma[i]).fold(0.0, f64::max);
    let cutoff = rcond * sigma_max;
    // P = V Σ⁺ Uᵀ over the retained singular triplets.
    let retained: Vec<(usize, f64)> = (0..k)
        .filter(|&i| sigma[i] > cutoff && sigma[i] > 0.0)
        .map(|i| (i, 1.0 / sigma[i]))
        .collect();
    let p = Matrix::from_fn(cols, rows, |i, j| {
        retained
            .iter()
            .map(|&(t, inv)| v[(i, t)] * inv * u[(j, t)])
            .sum::<f64>()
    });
    Ok(p)
}
