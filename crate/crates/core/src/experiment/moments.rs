//! Monte Carlo estimates of the random-matrix moments behind the closed form:
//!
//! * `E[A_S⁺ A_S] = (min{p_S, n} / p_S) I_{p_S}`
//! * `E[(A_S A_Sᵀ)⁺] = (γ / n) I_n`
//! * `E[A_Cᵀ A_C] = n I_{p_C}`

use crate::error::{Error, Result};
use crate::numkit::{pseudoinverse, sample_gaussian_matrix, Matrix, RandomStream};

fn average(
    draws: usize,
    shape: (usize, usize),
    mut sample: impl FnMut() -> Result<Matrix>,
) -> Result<Matrix> {
    if draws == 0 {
        return Err(Error::InvalidArgument("at least one draw is required".into()));
    }
    let mut acc = Matrix::zeros(shape.0, shape.1);
    for _ in 0..draws {
        acc += sample()?;
    }
    Ok(acc / draws as f64)
}

/// Mean of the projection `A_S⁺ A_S` over `draws` standard normal `n × p_S`
/// matrices.
pub fn estimate_projection_mean(p_s: usize, n: usize, draws: usize, rng: &mut RandomStream) -> Result<Matrix> {
    average(draws, (p_s, p_s), || {
        let a = sample_gaussian_matrix(n, p_s, rng)?;
        Ok(pseudoinverse(&a, None)? * a)
    })
}

/// Mean of `(A_S A_Sᵀ)⁺`.
pub fn estimate_gram_pinv_mean(p_s: usize, n: usize, draws: usize, rng: &mut RandomStream) -> Result<Matrix> {
    average(draws, (n, n), || {
        let a = sample_gaussian_matrix(n, p_s, rng)?;
        pseudoinverse(&(&a * a.transpose()), None)
    })
}

/// Mean of `A_Cᵀ A_C` for `n × p_C` standard normal `A_C`.
pub fn estimate_complement_gram_mean(p_c: usize, n: usize, draws: usize, rng: &mut RandomStream) -> Result<Matrix> {
    average(draws, (p_c, p_c), || {
        let a = sample_gaussian_matrix(n, p_c, rng)?;
        Ok(a.transpose() * a)
    })
}
