//! Linear estimators `x̂ = W y` and their exact conditional MSE given `A`.
//!
//! Every MSE here is a trace formula in the true second-order statistics, so
//! results are deterministic once the regressors are fixed.

use crate::error::{Error, Result};
use crate::model::{AssumedModelSpec, PartitionedCovariance};
use crate::numkit::{
    ensure_finite, pseudoinverse, trace_of_product, CovarianceMatrix, GaussianSampler, Matrix, Vector,
};

/// A `target_dim × n` linear estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightsMatrix(Matrix);

impl WeightsMatrix {
    pub fn new(w: Matrix) -> Result<Self> {
        ensure_finite(&w, "weights")?;
        Ok(WeightsMatrix(w))
    }

    pub fn target_dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn n(&self) -> usize {
        self.0.ncols()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn apply(&self, y: &Vector) -> Result<Vector> {
        if y.len() != self.n() {
            return Err(Error::dims(
                "apply",
                format!("weights expect {} observations, got {}", self.n(), y.len()),
            ));
        }
        Ok(&self.0 * y)
    }
}

/// Which form of the oracle partial estimator to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OracleMode {
    /// `K_{x_S} A_Sᵀ (A K_x Aᵀ + σ_v² I)⁺`, dropping the cross-covariance.
    #[default]
    Literal,
    /// `(K_{x_S} A_Sᵀ + K_{x_S x_C} A_Cᵀ)(A K_x Aᵀ + σ_v² I)⁺`, the true
    /// cross-covariance `K_{x_S y}` for any `K_x`.
    General,
}

fn check_noise(op: &'static str, noise_variance: f64) -> Result<()> {
    if noise_variance >= 0.0 && noise_variance.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{op}: noise variance must be finite and nonnegative, got {noise_variance}"
        )))
    }
}

/// `K Aᵀ (A K Aᵀ + σ² I)⁺`, inverting whichever Gram matrix is smaller.
///
/// With `K = F Fᵀ` and `B = A F`, `Bᵀ (B Bᵀ + σ² I)⁺ = (Bᵀ B + σ² I)⁺ Bᵀ`
/// for every `σ² ≥ 0`, so a tall `A` gives `F (Bᵀ B + σ² I)⁺ Bᵀ`. Both Gram
/// matrices share their largest eigenvalue, so a relative `rcond` cuts the
/// same spectrum.
fn regularized_weights(a: &Matrix, k: &CovarianceMatrix, sigma2: f64, rcond: Option<f64>) -> Result<Matrix> {
    let (n, p) = a.shape();
    if n <= p {
        let k_at = k.as_matrix() * a.transpose();
        let k_y = add_diagonal(a * &k_at, sigma2);
        return Ok(k_at * pseudoinverse(&k_y, rcond)?);
    }
    if k.is_identity() {
        let gram = add_diagonal(a.transpose() * a, sigma2);
        return Ok(pseudoinverse(&gram, rcond)? * a.transpose());
    }
    let sampler = GaussianSampler::new(k)?;
    let f = sampler.factor();
    let b = a * f;
    let gram = add_diagonal(b.transpose() * &b, sigma2);
    Ok(f * pseudoinverse(&gram, rcond)? * b.transpose())
}

/// `M + σ² I` for square `M`.
fn add_diagonal(mut m: Matrix, sigma2: f64) -> Matrix {
    for i in 0..m.nrows() {
        m[(i, i)] += sigma2;
    }
    m
}

/// Full LMMSE weights `W_O = K_x Aᵀ (A K_x Aᵀ + σ_v² I_n)⁺`.
pub fn full_lmmse_weights(
    a: &Matrix,
    k_x: &CovarianceMatrix,
    noise_variance: f64,
    rcond: Option<f64>,
) -> Result<WeightsMatrix> {
    check_noise("full_lmmse_weights", noise_variance)?;
    if a.ncols() != k_x.dim() {
        return Err(Error::dims(
            "full_lmmse_weights",
            format!("A is {}x{}, K_x is {}x{}", a.nrows(), a.ncols(), k_x.dim(), k_x.dim()),
        ));
    }
    WeightsMatrix::new(regularized_weights(a, k_x, noise_variance, rcond)?)
}

/// Mismatched partial LMMSE weights
/// `W_S = K̂_{x_S} A_Sᵀ (A_S K̂_{x_S} A_Sᵀ + σ̂_z² I_n)⁺`.
pub fn partial_lmmse_weights(
    a_s: &Matrix,
    assumed: &AssumedModelSpec,
    rcond: Option<f64>,
) -> Result<WeightsMatrix> {
    if a_s.ncols() != assumed.p_s() {
        return Err(Error::dims(
            "partial_lmmse_weights",
            format!("A_S has {} columns, assumed model has p_S={}", a_s.ncols(), assumed.p_s()),
        ));
    }
    WeightsMatrix::new(regularized_weights(a_s, assumed.k_hat_xs(), assumed.noise_variance(), rcond)?)
}

/// Oracle weights for `x_S` computed from the true statistics.
pub fn oracle_partial_weights(
    a: &Matrix,
    part: &PartitionedCovariance,
    noise_variance: f64,
    mode: OracleMode,
    rcond: Option<f64>,
) -> Result<WeightsMatrix> {
    check_noise("oracle_partial_weights", noise_variance)?;
    let (a_s, a_c) = part.split_columns(a)?;
    let k_x = part.assemble();
    let k_y = add_diagonal(a * k_x * a.transpose(), noise_variance);
    let mut k_xs_y = part.k_xs().as_matrix() * a_s.transpose();
    if mode == OracleMode::General && part.p_c() > 0 {
        k_xs_y += part.k_xs_xc() * a_c.transpose();
    }
    WeightsMatrix::new(k_xs_y * pseudoinverse(&k_y, rcond)?)
}

/// `J(W) = tr((I − W A) K_x (I − W A)ᵀ + σ_v² W Wᵀ)`.
pub fn mse_full(
    w: &WeightsMatrix,
    a: &Matrix,
    k_x: &CovarianceMatrix,
    noise_variance: f64,
) -> Result<f64> {
    check_noise("mse_full", noise_variance)?;
    let p = k_x.dim();
    if a.ncols() != p || w.target_dim() != p || w.n() != a.nrows() {
        return Err(Error::dims(
            "mse_full",
            format!(
                "W is {}x{}, A is {}x{}, K_x is {p}x{p}",
                w.target_dim(),
                w.n(),
                a.nrows(),
                a.ncols()
            ),
        ));
    }
    let e = Matrix::identity(p, p) - w.as_matrix() * a;
    let signal = trace_of_product(&(&e * k_x.as_matrix()), &e.transpose());
    Ok(signal + noise_variance * w.as_matrix().norm_squared())
}

/// Conditional MSE over `x_S` of an arbitrary `W_S` when the data come from
/// the full system:
///
/// `tr((I − W_S A_S) K_{x_S} (I − W_S A_S)ᵀ + W_S A_C K_{x_C} A_Cᵀ W_Sᵀ
///   + σ_v² W_S W_Sᵀ − 2 W_S A_C K_{x_C x_S} (I − W_S A_S)ᵀ)`.
pub fn mse_partial_conditional(
    w_s: &WeightsMatrix,
    a_s: &Matrix,
    a_c: &Matrix,
    part: &PartitionedCovariance,
    noise_variance: f64,
) -> Result<f64> {
    check_noise("mse_partial_conditional", noise_variance)?;
    let (p_s, p_c) = (part.p_s(), part.p_c());
    let n = w_s.n();
    if w_s.target_dim() != p_s
        || a_s.shape() != (n, p_s)
        || a_c.shape() != (n, p_c)
    {
        return Err(Error::dims(
            "mse_partial_conditional",
            format!(
                "W_S is {}x{}, A_S is {}x{}, A_C is {}x{}, partition is p_S={p_s}, p_C={p_c}",
                w_s.target_dim(),
                n,
                a_s.nrows(),
                a_s.ncols(),
                a_c.nrows(),
                a_c.ncols()
            ),
        ));
    }
    let w = w_s.as_matrix();
    let e = Matrix::identity(p_s, p_s) - w * a_s;
    let mut j = trace_of_product(&(&e * part.k_xs().as_matrix()), &e.transpose())
        + noise_variance * w.norm_squared();
    if p_c > 0 {
        let b = w * a_c;
        j += trace_of_product(&(&b * part.k_xc().as_matrix()), &b.transpose());
        j -= 2.0 * trace_of_product(&(&b * part.k_xc_xs()), &e.transpose());
    }
    Ok(j)
}

/// Simplified conditional MSE at `W_S = A_S⁺`:
///
/// `tr(K_{x_S} − A_S⁺A_S K_{x_S} + A_Cᵀ (A_S A_Sᵀ)⁺ A_C K_{x_C} + σ_v² (A_S A_Sᵀ)⁺)`.
///
/// The two pseudoinverses are computed independently, so agreement with
/// [`mse_partial_conditional`] exercises the Moore-Penrose identities rather
/// than restating them.
pub fn mse_partial_pinv_form(
    a_s: &Matrix,
    a_c: &Matrix,
    part: &PartitionedCovariance,
    noise_variance: f64,
    rcond: Option<f64>,
) -> Result<f64> {
    check_noise("mse_partial_pinv_form", noise_variance)?;
    let (n, p_s, p_c) = (a_s.nrows(), part.p_s(), part.p_c());
    if a_s.ncols() != p_s || a_c.shape() != (n, p_c) {
        return Err(Error::dims(
            "mse_partial_pinv_form",
            format!(
                "A_S is {}x{}, A_C is {}x{}, partition is p_S={p_s}, p_C={p_c}",
                n,
                a_s.ncols(),
                a_c.nrows(),
                a_c.ncols()
            ),
        ));
    }
    let projection = pseudoinverse(a_s, rcond)? * a_s;
    let gram_pinv = pseudoinverse(&(a_s * a_s.transpose()), rcond)?;
    let k_s = part.k_xs().as_matrix();
    let mut j = k_s.trace() - trace_of_product(&projection, k_s) + noise_variance * gram_pinv.trace();
    if p_c > 0 {
        let folded = a_c.transpose() * &gram_pinv * a_c;
        j += trace_of_product(&folded, part.k_xc().as_matrix());
    }
    Ok(j)
}

/// Rounding slack below zero tolerated for trace-formula MSE values.
const NEGATIVE_SLACK: f64 = 1e-9;

/// Whole-vector MSE `J = J_S + tr(K_{x_C})`, counting `x̂_C = 0`.
pub fn mse_whole_vector(j_s: f64, part: &PartitionedCovariance) -> Result<f64> {
    if j_s.is_nan() || j_s < -NEGATIVE_SLACK {
        return Err(Error::InvalidArgument(format!(
            "partial MSE must be nonnegative, got {j_s}"
        )));
    }
    Ok(j_s + part.tr_k_xc())
}
