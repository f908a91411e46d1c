use std::fmt;
use std::str::FromStr;

use super::labels;
use crate::error::{Error, Result};
use crate::numkit::{sample_gaussian_matrix, CovarianceMatrix, RandomStream};

pub const DEFAULT_SEED: u64 = 20_201_104;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioId {
    S1,
    S2,
    S3,
    S4,
    Custom,
}

impl ScenarioId {
    /// Stream label.
    pub fn index(self) -> u64 {
        match self {
            ScenarioId::Custom => 0,
            ScenarioId::S1 => 1,
            ScenarioId::S2 => 2,
            ScenarioId::S3 => 3,
            ScenarioId::S4 => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioId::S1 => "s1",
            ScenarioId::S2 => "s2",
            ScenarioId::S3 => "s3",
            ScenarioId::S4 => "s4",
            ScenarioId::Custom => "custom",
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "s1" => Ok(ScenarioId::S1),
            "s2" => Ok(ScenarioId::S2),
            "s3" => Ok(ScenarioId::S3),
            "s4" => Ok(ScenarioId::S4),
            "custom" => Ok(ScenarioId::Custom),
            other => Err(Error::InvalidArgument(format!("unknown scenario '{other}'"))),
        }
    }
}

/// How the per-replicate MSE is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EstimatorMode {
    /// One `(x, v)` draw per replicate: `‖x_S − x̂_S‖² + tr(K_{x_C})`.
    Draw,
    /// Exact conditional MSE given the drawn `A`; only `A` is sampled.
    #[default]
    Conditional,
}

impl EstimatorMode {
    pub fn as_str(self) -> &'static str {
        match self {
            EstimatorMode::Draw => "draw",
            EstimatorMode::Conditional => "conditional",
        }
    }
}

impl fmt::Display for EstimatorMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EstimatorMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "draw" => Ok(EstimatorMode::Draw),
            "conditional" => Ok(EstimatorMode::Conditional),
            other => Err(Error::InvalidArgument(format!("unknown estimator mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CovarianceRule {
    /// `K_x = σ_x² I_p`.
    Identity,
    /// `K_x = σ_x² p / tr(CᵀC) · CᵀC` with `C` a `p × p` standard normal
    /// matrix drawn once per sweep.
    Randomized,
    Explicit(CovarianceMatrix),
}

impl CovarianceRule {
    pub fn name(&self) -> &'static str {
        match self {
            CovarianceRule::Identity => "identity",
            CovarianceRule::Randomized => "randomized",
            CovarianceRule::Explicit(_) => "explicit",
        }
    }
}

/// Everything needed to reproduce a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: ScenarioId,
    pub p: usize,
    /// `σ_x²`, per-unknown signal power.
    pub signal_variance: f64,
    /// `σ_v²`, true noise variance per sample.
    pub noise_variance: f64,
    /// `σ̂_z²`, noise variance the partial estimator assumes.
    pub assumed_noise_variance: f64,
    pub covariance: CovarianceRule,
    pub p_s_values: Vec<usize>,
    pub n_values: Vec<usize>,
    pub replicates: usize,
    pub seed: u64,
    pub mode: EstimatorMode,
    /// Share `A` across all cells (and the baseline) with the same `n` and
    /// replicate index.
    pub common_random_numbers: bool,
    pub rcond: Option<f64>,
}

impl ScenarioConfig {
    /// Experiment presets with `p = 30`, `M = 100`, `K̂_{x_S} = I`:
    ///
    /// | id | `K_x` | `σ_v` | `σ̂_z` |
    /// |----|-------|-------|-------|
    /// | S1 | `I` | 0.5 | 0 |
    /// | S2 | `I` | `√p` | 0 |
    /// | S3 | randomized | 0.5 | 0 |
    /// | S4 | `I` | 0.5 | 0.5 |
    ///
    /// `Custom` starts from the S1 values.
    pub fn preset(scenario: ScenarioId) -> Self {
        let p = 30;
        let (noise_variance, assumed_noise_variance, covariance) = match scenario {
            ScenarioId::S1 | ScenarioId::Custom => (0.25, 0.0, CovarianceRule::Identity),
            ScenarioId::S2 => (p as f64, 0.0, CovarianceRule::Identity),
            ScenarioId::S3 => (0.25, 0.0, CovarianceRule::Randomized),
            ScenarioId::S4 => (0.25, 0.25, CovarianceRule::Identity),
        };
        ScenarioConfig {
            scenario,
            p,
            signal_variance: 1.0,
            noise_variance,
            assumed_noise_variance,
            covariance,
            p_s_values: vec![5, 10, 20, 29, 30],
            n_values: (1..=45).map(|k| 2 * k).collect(),
            replicates: 100,
            seed: DEFAULT_SEED,
            mode: EstimatorMode::Conditional,
            common_random_numbers: false,
            rcond: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 {
            return Err(Error::InvalidArgument("p must be positive".into()));
        }
        for (name, v) in [
            ("signal variance", self.signal_variance),
            ("noise variance", self.noise_variance),
            ("assumed noise variance", self.assumed_noise_variance),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be finite and nonnegative, got {v}"
                )));
            }
        }
        if self.replicates == 0 {
            return Err(Error::InvalidArgument("at least one replicate is required".into()));
        }
        if self.p_s_values.is_empty() || self.n_values.is_empty() {
            return Err(Error::InvalidArgument("p_S and n grids must be nonempty".into()));
        }
        if let Some(&bad) = self.p_s_values.iter().find(|&&p_s| p_s == 0 || p_s > self.p) {
            return Err(Error::InvalidArgument(format!(
                "p_S={bad} outside 1..={}",
                self.p
            )));
        }
        if self.n_values.contains(&0) {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        if let CovarianceRule::Explicit(k) = &self.covariance {
            if k.dim() != self.p {
                return Err(Error::InvalidArgument(format!(
                    "explicit K_x is {0}x{0}, expected p={1}",
                    k.dim(),
                    self.p
                )));
            }
        }
        if let Some(r) = self.rcond {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(Error::InvalidArgument(format!("rcond must be nonnegative, got {r}")));
            }
        }
        Ok(())
    }

    /// Grid values sorted and deduplicated.
    pub fn canonical_grid(&self) -> (Vec<usize>, Vec<usize>) {
        let mut ps = self.p_s_values.clone();
        ps.sort_unstable();
        ps.dedup();
        let mut ns = self.n_values.clone();
        ns.sort_unstable();
        ns.dedup();
        (ps, ns)
    }

    /// The assumed model believes `K̂_{x_S} = I`, so the closed form applies
    /// exactly when it also assumes no noise.
    pub fn closed_form_applies(&self) -> bool {
        self.assumed_noise_variance == 0.0
    }
}

/// Builds `K_x` from the configured rule, drawing from `rng` only for the
/// randomized rule.
pub fn build_scenario_covariance(cfg: &ScenarioConfig, rng: &mut RandomStream) -> Result<CovarianceMatrix> {
    let p = cfg.p;
    match &cfg.covariance {
        CovarianceRule::Identity => CovarianceMatrix::scaled_identity(p, cfg.signal_variance),
        CovarianceRule::Randomized => {
            let c = sample_gaussian_matrix(p, p, rng)?;
            let gram = c.transpose() * c;
            let scale = cfg.signal_variance * p as f64 / gram.trace();
            CovarianceMatrix::symmetrized(gram * scale)
        }
        CovarianceRule::Explicit(k) => Ok(k.clone()),
    }
}

/// [`build_scenario_covariance`] on the sweep's dedicated covariance stream,
/// so every cell of a sweep sees the same `K_x`.
pub fn scenario_covariance(cfg: &ScenarioConfig) -> Result<CovarianceMatrix> {
    let mut rng = RandomStream::derive(cfg.seed, &[cfg.scenario.index(), labels::COVARIANCE]);
    build_scenario_covariance(cfg, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_presets() {
        for id in [ScenarioId::S1, ScenarioId::S2, ScenarioId::S4] {
            let k = scenario_covariance(&ScenarioConfig::preset(id)).unwrap();
            assert!(k.is_identity());
            assert_eq!(k.trace(), 30.0);
        }
    }

    #[test]
    fn preset_noise_levels() {
        let s1 = ScenarioConfig::preset(ScenarioId::S1);
        assert_eq!((s1.p, s1.noise_variance, s1.assumed_noise_variance), (30, 0.25, 0.0));
        assert_eq!(s1.replicates, 100);
        assert_eq!(ScenarioConfig::preset(ScenarioId::S2).noise_variance, 30.0);
        let s4 = ScenarioConfig::preset(ScenarioId::S4);
        assert_eq!(s4.assumed_noise_variance, s4.noise_variance);
        assert!(!s4.closed_form_applies());
    }

    #[test]
    fn randomized_covariance_has_fixed_trace() {
        for seed in [0, 1, 99, u64::MAX] {
            let mut cfg = ScenarioConfig::preset(ScenarioId::S3);
            cfg.seed = seed;
            let k = scenario_covariance(&cfg).unwrap();
            assert!((k.trace() - 30.0).abs() < 1e-10);
            assert_eq!(k, scenario_covariance(&cfg).unwrap());
        }
    }

    #[test]
    fn randomized_covariance_small_is_full_rank() {
        let mut cfg = ScenarioConfig::preset(ScenarioId::S3);
        cfg.p = 4;
        let k = scenario_covariance(&cfg).unwrap();
        let eig = k.as_matrix().clone().symmetric_eigenvalues();
        assert!(eig.iter().all(|&l| l > 0.0), "eigenvalues {eig}");
    }

    #[test]
    fn validation() {
        let mut cfg = ScenarioConfig::preset(ScenarioId::S1);
        assert!(cfg.validate().is_ok());
        cfg.p_s_values.push(31);
        assert!(cfg.validate().is_err());
        let mut cfg = ScenarioConfig::preset(ScenarioId::S1);
        cfg.replicates = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = ScenarioConfig::preset(ScenarioId::S1);
        cfg.n_values.clear();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn parse_ids() {
        assert_eq!("S3".parse::<ScenarioId>().unwrap(), ScenarioId::S3);
        assert_eq!("draw".parse::<EstimatorMode>().unwrap(), EstimatorMode::Draw);
        assert!("s5".parse::<ScenarioId>().is_err());
    }
}
