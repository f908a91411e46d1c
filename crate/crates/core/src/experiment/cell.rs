use super::labels;
use super::record::{RecordFlags, SweepRecord};
use super::scenario::{scenario_covariance, EstimatorMode, ScenarioConfig};
use crate::analytic::{expected_mse_theorem1, gamma, whole_vector_expected_mse, TheoryInputs};
use crate::error::{Error, Result};
use crate::estimator::{
    full_lmmse_weights, mse_full, mse_partial_conditional, mse_whole_vector, partial_lmmse_weights,
};
use crate::model::{draw_system_with, partition, AssumedModelSpec, PartitionedCovariance, SystemSpec};
use crate::numkit::{sample_gaussian_matrix, GaussianSampler, RandomStream};

/// Sample mean and standard error (unbiased sample deviation over `√M`).
pub(crate) fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
    (mean, (ss / (m - 1.0) / m).sqrt())
}

/// Empirical full-LMMSE MSE at one sample size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineEstimate {
    pub n: usize,
    pub mean: f64,
    pub stderr: f64,
    pub seed: u64,
}

/// A validated configuration with its `K_x` built once.
#[derive(Debug, Clone)]
pub struct Experiment {
    cfg: ScenarioConfig,
    system: SystemSpec,
    sampler: GaussianSampler,
}

impl Experiment {
    pub fn new(cfg: ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        let k_x = scenario_covariance(&cfg)?;
        let sampler = GaussianSampler::new(&k_x)?;
        let system = SystemSpec::new(k_x, cfg.noise_variance)?;
        Ok(Experiment { cfg, system, sampler })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    pub fn system(&self) -> &SystemSpec {
        &self.system
    }

    fn common_seed(&self, n: usize) -> u64 {
        RandomStream::derive_seed(self.cfg.seed, &[self.cfg.scenario.index(), labels::COMMON, n as u64])
    }

    /// Seed of the stream family for cell `(p_S, n)`; replicate `j` draws
    /// from `RandomStream::derive(cell_seed, &[j])`.
    pub fn cell_seed(&self, p_s: usize, n: usize) -> u64 {
        if self.cfg.common_random_numbers {
            return self.common_seed(n);
        }
        RandomStream::derive_seed(
            self.cfg.seed,
            &[self.cfg.scenario.index(), labels::CELL, p_s as u64, n as u64],
        )
    }

    pub fn baseline_seed(&self, n: usize) -> u64 {
        if self.cfg.common_random_numbers {
            return self.common_seed(n);
        }
        RandomStream::derive_seed(self.cfg.seed, &[self.cfg.scenario.index(), labels::BASELINE, n as u64])
    }

    fn replicate(
        &self,
        part: &PartitionedCovariance,
        assumed: &AssumedModelSpec,
        n: usize,
        rng: &mut RandomStream,
    ) -> Result<f64> {
        let rcond = self.cfg.rcond;
        let noise = self.cfg.noise_variance;
        match self.cfg.mode {
            EstimatorMode::Conditional => {
                let a = sample_gaussian_matrix(n, self.system.p(), rng)?;
                let (a_s, a_c) = part.split_columns(&a)?;
                let w_s = partial_lmmse_weights(&a_s, assumed, rcond)?;
                let j_s = mse_partial_conditional(&w_s, &a_s, &a_c, part, noise)?;
                mse_whole_vector(j_s, part)
            }
            EstimatorMode::Draw => {
                let draw = draw_system_with(&self.system, &self.sampler, n, rng)?;
                let (a_s, _) = part.split_columns(&draw.a)?;
                let (x_s, _) = part.split_vector(&draw.x)?;
                let w_s = partial_lmmse_weights(&a_s, assumed, rcond)?;
                let x_hat = w_s.apply(&draw.y)?;
                Ok((x_s - x_hat).norm_squared() + part.tr_k_xc())
            }
        }
    }

    /// Runs the `M` replicates of one grid cell. Any failure aborts the
    /// cell with an [`Error::Cell`] naming the 1-based replicate.
    pub fn run_cell(&self, p_s: usize, n: usize) -> Result<SweepRecord> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        let part = partition(&self.system, p_s)?;
        let assumed = AssumedModelSpec::identity(p_s, self.cfg.assumed_noise_variance)?;
        let seed = self.cell_seed(p_s, n);
        let m = self.cfg.replicates;

        let mut values = Vec::with_capacity(m);
        for j in 1..=m {
            let mut rng = RandomStream::derive(seed, &[j as u64]);
            let cell_error = |source: Error| Error::Cell {
                p_s,
                n,
                replicate: j,
                source: Box::new(source),
            };
            let value = self.replicate(&part, &assumed, n, &mut rng).map_err(cell_error)?;
            if !value.is_finite() {
                return Err(cell_error(Error::Numerical(format!("non-finite MSE {value}"))));
            }
            values.push(value);
        }
        let (mean, stderr) = mean_and_stderr(&values);

        let analytic_mse = self.cfg.closed_form_applies().then(|| {
            let eps_s = expected_mse_theorem1(&TheoryInputs {
                p_s,
                n,
                tr_k_xs: part.tr_k_xs(),
                tr_k_xc: part.tr_k_xc(),
                tr_k_v: n as f64 * self.cfg.noise_variance,
            });
            whole_vector_expected_mse(eps_s, part.tr_k_xc())
        });

        Ok(SweepRecord {
            scenario: self.cfg.scenario,
            p: self.system.p(),
            p_s,
            n,
            replicates: m,
            mode: self.cfg.mode,
            empirical_mse: mean,
            stderr,
            analytic_mse,
            baseline_mse: None,
            gamma: Some(gamma(p_s, n).value()),
            flags: RecordFlags {
                near_interpolation: p_s.abs_diff(n) <= 1,
                degenerate_stderr: m == 1,
                ..Default::default()
            },
            seed,
            error: None,
        })
    }

    /// Average of the exact conditional MSE of the full LMMSE estimator over
    /// `M` draws of `A`.
    pub fn run_baseline_cell(&self, n: usize) -> Result<BaselineEstimate> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        let seed = self.baseline_seed(n);
        let k_x = self.system.k_x();
        let noise = self.cfg.noise_variance;
        let mut values = Vec::with_capacity(self.cfg.replicates);
        for j in 1..=self.cfg.replicates {
            let mut rng = RandomStream::derive(seed, &[j as u64]);
            let value = sample_gaussian_matrix(n, self.system.p(), &mut rng)
                .and_then(|a| {
                    let w = full_lmmse_weights(&a, k_x, noise, self.cfg.rcond)?;
                    mse_full(&w, &a, k_x, noise)
                })
                .map_err(|source| Error::Cell {
                    p_s: 0,
                    n,
                    replicate: j,
                    source: Box::new(source),
                })?;
            values.push(value);
        }
        let (mean, stderr) = mean_and_stderr(&values);
        Ok(BaselineEstimate { n, mean, stderr, seed })
    }

    pub(crate) fn baseline_record(&self, n: usize) -> SweepRecord {
        let mut record = SweepRecord {
            scenario: self.cfg.scenario,
            p: self.system.p(),
            p_s: 0,
            n,
            replicates: self.cfg.replicates,
            mode: EstimatorMode::Conditional,
            empirical_mse: f64::NAN,
            stderr: f64::NAN,
            analytic_mse: None,
            baseline_mse: None,
            gamma: None,
            flags: RecordFlags {
                baseline: true,
                degenerate_stderr: self.cfg.replicates == 1,
                ..Default::default()
            },
            seed: self.baseline_seed(n),
            error: None,
        };
        match self.run_baseline_cell(n) {
            Ok(est) => {
                record.empirical_mse = est.mean;
                record.stderr = est.stderr;
                record.baseline_mse = Some(est.mean);
            }
            Err(e) => {
                record.flags.failed = true;
                record.error = Some(e.to_string());
            }
        }
        record
    }

    /// [`Experiment::run_cell`], with failures folded into a flagged record.
    pub(crate) fn cell_record(&self, p_s: usize, n: usize) -> SweepRecord {
        self.run_cell(p_s, n).unwrap_or_else(|e| SweepRecord {
            scenario: self.cfg.scenario,
            p: self.system.p(),
            p_s,
            n,
            replicates: self.cfg.replicates,
            mode: self.cfg.mode,
            empirical_mse: f64::NAN,
            stderr: f64::NAN,
            analytic_mse: None,
            baseline_mse: None,
            gamma: Some(gamma(p_s, n).value()),
            flags: RecordFlags {
                near_interpolation: p_s.abs_diff(n) <= 1,
                degenerate_stderr: self.cfg.replicates == 1,
                failed: true,
                ..Default::default()
            },
            seed: self.cell_seed(p_s, n),
            error: Some(e.to_string()),
        })
    }
}

/// One cell without a prepared [`Experiment`].
pub fn run_cell(cfg: &ScenarioConfig, p_s: usize, n: usize) -> Result<SweepRecord> {
    Experiment::new(cfg.clone())?.run_cell(p_s, n)
}

/// Mean full-LMMSE MSE at `n` without a prepared [`Experiment`].
pub fn run_baseline_cell(cfg: &ScenarioConfig, n: usize) -> Result<f64> {
    Ok(Experiment::new(cfg.clone())?.run_baseline_cell(n)?.mean)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stderr_of_constant_is_zero() {
        assert_eq!(mean_and_stderr(&[2.0, 2.0, 2.0]), (2.0, 0.0));
        assert_eq!(mean_and_stderr(&[5.0]), (5.0, 0.0));
        let (m, se) = mean_and_stderr(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((se - 1.0).abs() < 1e-15);
    }
}
