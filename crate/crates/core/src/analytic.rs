//! Closed-form expected MSE of the mismatched partial estimator over i.i.d.
//! standard Gaussian regressors, for `K̂_{x_S} = I` and `σ̂_z = 0`.
//!
//! Infinite expectations are represented as `f64::INFINITY`.

use crate::error::{Error, Result};

/// The amplification factor
///
/// * `p_S / (n − p_S − 1)` when `p_S < n − 1`
/// * `n / (p_S − n − 1)` when `p_S > n + 1`
/// * `+∞` otherwise.
///
/// `tr E[(A_S A_Sᵀ)⁺] = γ`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Gamma(f64);

impl Gamma {
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    /// `γ · c`, with `∞ · 0 = 0` since the factor only ever multiplies
    /// nonnegative powers.
    pub fn scale(self, c: f64) -> f64 {
        if c == 0.0 {
            0.0
        } else {
            self.0 * c
        }
    }
}

pub fn gamma(p_s: usize, n: usize) -> Gamma {
    if p_s + 1 < n {
        Gamma(p_s as f64 / (n - p_s - 1) as f64)
    } else if p_s > n + 1 {
        Gamma(n as f64 / (p_s - n - 1) as f64)
    } else {
        Gamma(f64::INFINITY)
    }
}

/// Signal and noise powers entering the closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryInputs {
    pub p_s: usize,
    pub n: usize,
    pub tr_k_xs: f64,
    pub tr_k_xc: f64,
    /// Total noise power `tr(K_v)` over all `n` samples.
    pub tr_k_v: f64,
}

impl TheoryInputs {
    pub fn validate(&self) -> Result<()> {
        if self.p_s == 0 || self.n == 0 {
            return Err(Error::InvalidArgument(format!(
                "p_S and n must be positive, got p_S={}, n={}",
                self.p_s, self.n
            )));
        }
        for (name, v) in [
            ("tr(K_xS)", self.tr_k_xs),
            ("tr(K_xC)", self.tr_k_xc),
            ("tr(K_v)", self.tr_k_v),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be finite and nonnegative, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Expected MSE over `x_S`:
/// `tr(K_{x_S})(1 − min{p_S, n}/p_S) + γ (tr(K_{x_C}) + tr(K_v)/n)`.
///
/// The caller is responsible for the applicability conditions
/// (`K̂_{x_S} = I`, `σ̂_z = 0`, identity regressor covariance).
pub fn expected_mse_theorem1(inp: &TheoryInputs) -> f64 {
    let p_s = inp.p_s as f64;
    let n = inp.n as f64;
    let unrecovered = inp.tr_k_xs * (1.0 - p_s.min(n) / p_s);
    unrecovered + gamma(inp.p_s, inp.n).scale(inp.tr_k_xc + inp.tr_k_v / n)
}

/// Proportional-power special case:
/// `σ_x² (p_S − min{p_S, n}) + γ (σ_x² p_C + σ_v²)`.
pub fn expected_mse_corollary1(
    p_s: usize,
    p_c: usize,
    n: usize,
    signal_variance: f64,
    noise_variance: f64,
) -> f64 {
    let unrecovered = signal_variance * (p_s - p_s.min(n)) as f64;
    unrecovered + gamma(p_s, n).scale(signal_variance * p_c as f64 + noise_variance)
}

/// `ε = ε_S + tr(K_{x_C})`.
pub fn whole_vector_expected_mse(eps_s: f64, tr_k_xc: f64) -> f64 {
    eps_s + tr_k_xc
}

/// Sample size `n* = p + σ_v²/σ_x² + 1` separating the regime where adding
/// unknowns to the model helps (`n > n*`) from the one where it hurts
/// (`p + 1 < n < n*`).
pub fn monotonicity_threshold(p: usize, signal_variance: f64, noise_variance: f64) -> Result<f64> {
    if signal_variance.is_nan() || signal_variance <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "signal variance must be positive, got {signal_variance}"
        )));
    }
    Ok(p as f64 + noise_variance / signal_variance + 1.0)
}

/// `10 log₁₀(tr(K_x) / σ_v²)`.
pub fn snr_db(tr_k_x: f64, noise_variance: f64) -> Result<f64> {
    if !(tr_k_x > 0.0 && noise_variance > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "SNR needs positive powers, got tr(K_x)={tr_k_x}, σ_v²={noise_variance}"
        )));
    }
    Ok(10.0 * (tr_k_x / noise_variance).log10())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gamma_cases() {
        assert_eq!(gamma(29, 30).value(), f64::INFINITY);
        assert_eq!(gamma(30, 30).value(), f64::INFINITY);
        assert_eq!(gamma(31, 30).value(), f64::INFINITY);
        assert_eq!(gamma(2, 10).value(), 2.0 / 7.0);
        assert_eq!(gamma(10, 2).value(), 2.0 / 7.0);
        assert_eq!(gamma(28, 30).value(), 28.0);
        assert_eq!(gamma(32, 30).value(), 30.0);
    }

    #[test]
    fn theorem1_examples() {
        let zero = TheoryInputs { p_s: 5, n: 10, tr_k_xs: 5.0, tr_k_xc: 0.0, tr_k_v: 0.0 };
        assert_eq!(expected_mse_theorem1(&zero), 0.0);

        let under = TheoryInputs { p_s: 10, n: 30, tr_k_xs: 10.0, tr_k_xc: 20.0, tr_k_v: 7.5 };
        assert!((expected_mse_theorem1(&under) - 10.657894736842104).abs() < 1e-12);

        let over = TheoryInputs { p_s: 30, n: 10, tr_k_xs: 30.0, tr_k_xc: 0.0, tr_k_v: 2.5 };
        assert!((expected_mse_theorem1(&over) - 20.13157894736842).abs() < 1e-12);
    }

    #[test]
    fn theorem1_at_the_threshold() {
        let noisy = TheoryInputs { p_s: 10, n: 10, tr_k_xs: 10.0, tr_k_xc: 0.0, tr_k_v: 1.0 };
        assert_eq!(expected_mse_theorem1(&noisy), f64::INFINITY);
        // nothing for γ to amplify: only the unrecovered signal remains
        let clean = TheoryInputs { p_s: 12, n: 11, tr_k_xs: 12.0, tr_k_xc: 0.0, tr_k_v: 0.0 };
        assert!((expected_mse_theorem1(&clean) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn corollary1_examples() {
        assert!((expected_mse_corollary1(10, 20, 30, 1.0, 0.25) - 10.657894736842104).abs() < 1e-12);
        assert_eq!(expected_mse_corollary1(10, 0, 10, 1.0, 0.25), f64::INFINITY);
        // large-sample limit with the full model
        let e = expected_mse_corollary1(30, 0, 1_000_000, 1.0, 0.25);
        assert!((e - 0.25 * 30.0 / 999_969.0).abs() < 1e-15);
        assert!(e < 1e-5);
    }

    #[test]
    fn whole_vector_examples() {
        assert_eq!(whole_vector_expected_mse(0.0, 20.0), 20.0);
        assert!((whole_vector_expected_mse(10.6579, 20.0) - 30.6579).abs() < 1e-12);
        assert_eq!(whole_vector_expected_mse(f64::INFINITY, 5.0), f64::INFINITY);
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(monotonicity_threshold(30, 1.0, 0.25).unwrap(), 31.25);
        assert_eq!(monotonicity_threshold(30, 1.0, 30.0).unwrap(), 61.0);
        assert_eq!(monotonicity_threshold(30, 1.0, 0.0).unwrap(), 31.0);
        assert!(monotonicity_threshold(30, 0.0, 1.0).is_err());
    }

    #[test]
    fn snr_examples() {
        assert!((snr_db(30.0, 0.25).unwrap() - 20.79).abs() < 0.01);
        assert_eq!(snr_db(30.0, 30.0).unwrap(), 0.0);
        assert_eq!(snr_db(1.0, 1.0).unwrap(), 0.0);
        assert!(snr_db(0.0, 1.0).is_err());
        assert!(snr_db(1.0, -1.0).is_err());
    }

    #[test]
    fn inputs_validation() {
        let bad = TheoryInputs { p_s: 0, n: 3, tr_k_xs: 1.0, tr_k_xc: 0.0, tr_k_v: 0.0 };
        assert!(bad.validate().is_err());
        let neg = TheoryInputs { p_s: 2, n: 3, tr_k_xs: 1.0, tr_k_xc: -1.0, tr_k_v: 0.0 };
        assert!(neg.validate().is_err());
    }

    fn eps(p: usize, p_s: usize, n: usize, sx: f64, sv: f64) -> f64 {
        whole_vector_expected_mse(
            expected_mse_corollary1(p_s, p - p_s, n, sx, sv),
            sx * (p - p_s) as f64,
        )
    }

    #[test]
    fn model_order_monotonicity_on_the_grid() {
        let p = 30;
        for (sv, n_star) in [(0.25, 31.25), (30.0, 61.0), (5.0, 36.0)] {
            for n in (p + 2)..=120 {
                let curve: Vec<f64> = (1..=p).map(|p_s| eps(p, p_s, n, 1.0, sv)).collect();
                let argmin = curve
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.total_cmp(b.1))
                    .map(|(i, _)| i + 1)
                    .unwrap();
                if n as f64 > n_star {
                    assert!(curve.windows(2).all(|w| w[1] < w[0]), "σ_v²={sv}, n={n}");
                    assert_eq!(argmin, p);
                } else if (n as f64) < n_star {
                    assert!(curve.windows(2).all(|w| w[1] > w[0]), "σ_v²={sv}, n={n}");
                    assert_eq!(argmin, 1);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn gamma_is_symmetric(a in 1usize..200, b in 1usize..200) {
            let (ga, gb) = (gamma(a, b), gamma(b, a));
            prop_assert_eq!(ga.is_finite(), a.abs_diff(b) >= 2);
            if ga.is_finite() {
                prop_assert_eq!(ga.value(), gb.value());
                prop_assert_eq!(ga.value(), a.min(b) as f64 / (a.abs_diff(b) - 1) as f64);
            }
        }

        #[test]
        fn corollary_matches_theorem(p_s in 1usize..60, p_c in 0usize..40, n in 1usize..120,
                                     sx in 0.01f64..5.0, sv in 0.0f64..40.0) {
            let cor = expected_mse_corollary1(p_s, p_c, n, sx, sv);
            let thm = expected_mse_theorem1(&TheoryInputs {
                p_s,
                n,
                tr_k_xs: sx * p_s as f64,
                tr_k_xc: sx * p_c as f64,
                tr_k_v: n as f64 * sv,
            });
            if cor.is_infinite() || thm.is_infinite() {
                prop_assert_eq!(cor, thm);
            } else {
                prop_assert!((cor - thm).abs() <= 1e-12 * cor.abs().max(1.0));
            }
        }

        #[test]
        fn more_samples_never_hurt_past_the_peak(p_s in 1usize..50, n in 3usize..150,
                                                 sx in 0.1f64..3.0, sv in 0.0f64..30.0, p_c in 0usize..30) {
            prop_assume!(n > p_s + 1);
            let now = expected_mse_corollary1(p_s, p_c, n, sx, sv);
            let next = expected_mse_corollary1(p_s, p_c, n + 1, sx, sv);
            prop_assert!(next <= now);
        }
    }
}
