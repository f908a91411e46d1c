//! Flag parsing and resolution of a [`ScenarioConfig`].
//!
//! Explicit flags override the scenario preset. Overrides that would change
//! what a named scenario means are rejected:
//!
//! * `s1`, `s2` and `s3` assume `σ̂_z² = 0`; `s4` assumes `σ̂_z² = σ_v²` (and
//!   `--sigma-v2` alone moves both).
//! * `s3` uses the randomized `K_x`; the others use the identity.
//!
//! `custom` accepts any combination.

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use lmmse_core::{CovarianceRule, EstimatorMode, ScenarioConfig, ScenarioId};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioArg {
    S1,
    S2,
    S3,
    S4,
    Custom,
}

impl From<ScenarioArg> for ScenarioId {
    fn from(s: ScenarioArg) -> Self {
        match s {
            ScenarioArg::S1 => ScenarioId::S1,
            ScenarioArg::S2 => ScenarioId::S2,
            ScenarioArg::S3 => ScenarioId::S3,
            ScenarioArg::S4 => ScenarioId::S4,
            ScenarioArg::Custom => ScenarioId::Custom,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Draw,
    Conditional,
}

impl From<ModeArg> for EstimatorMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Draw => EstimatorMode::Draw,
            ModeArg::Conditional => EstimatorMode::Conditional,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CovarianceArg {
    Identity,
    Randomized,
}

/// Empirical vs. analytical MSE of a mismatched-order LMMSE estimator,
/// swept over the assumed model order p_S and the number of samples n.
#[derive(Debug, Clone, Parser)]
#[command(name = "lmmse-mismatch", version)]
pub struct Args {
    /// Experiment preset.
    #[arg(long, value_enum, default_value = "s1")]
    pub scenario: ScenarioArg,
    /// Number of unknowns.
    #[arg(long)]
    pub p: Option<usize>,
    /// Assumed model orders: comma list and/or ranges `a:b`, `a:step:b`.
    #[arg(long, value_name = "LIST")]
    pub ps: Option<String>,
    /// Sample counts: comma list and/or ranges `a:b`, `a:step:b`.
    #[arg(long, value_name = "LIST")]
    pub n: Option<String>,
    /// Monte Carlo replicates per cell.
    #[arg(long, value_name = "M")]
    pub replicates: Option<usize>,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Per-replicate MSE: exact given A (conditional) or one (x, v) draw.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// True noise variance σ_v².
    #[arg(long = "sigma-v2", value_name = "VAR")]
    pub sigma_v2: Option<f64>,
    /// Noise variance σ̂_z² assumed by the partial estimator.
    #[arg(long = "sigma-z2", value_name = "VAR")]
    pub sigma_z2: Option<f64>,
    /// Per-unknown signal variance σ_x².
    #[arg(long = "sigma-x2", value_name = "VAR")]
    pub sigma_x2: Option<f64>,
    /// Signal covariance rule.
    #[arg(long, value_enum)]
    pub kx: Option<CovarianceArg>,
    /// Share A across cells with the same n and replicate index.
    #[arg(long)]
    pub crn: bool,
    /// Relative singular-value cutoff for pseudoinverses.
    #[arg(long)]
    pub rcond: Option<f64>,
    /// CSV destination (stdout when absent). A `.manifest` sidecar is written next to it.
    #[arg(long = "out-csv", value_name = "PATH")]
    pub out_csv: Option<PathBuf>,
    /// SVG figure destination.
    #[arg(long = "out-svg", value_name = "PATH")]
    pub out_svg: Option<PathBuf>,
}

/// Expands `5,10,20:2:30,40:42` into a list, keeping the given order.
pub fn parse_list(spec: &str) -> Result<Vec<usize>, CliError> {
    let bad = |why: &str| CliError::usage(format!("malformed list '{spec}': {why}"));
    let num = |s: &str| -> Result<usize, CliError> {
        s.trim().parse::<usize>().map_err(|_| bad(&format!("'{}' is not a nonnegative integer", s.trim())))
    };
    let mut out = Vec::new();
    for item in spec.split(',') {
        if item.trim().is_empty() {
            return Err(bad("empty item"));
        }
        let parts: Vec<&str> = item.split(':').collect();
        let (start, step, stop) = match parts.as_slice() {
            [single] => {
                out.push(num(single)?);
                continue;
            }
            [a, b] => (num(a)?, 1, num(b)?),
            [a, s, b] => (num(a)?, num(s)?, num(b)?),
            _ => return Err(bad("a range has at most two ':'")),
        };
        if step == 0 {
            return Err(bad("step must be positive"));
        }
        if stop < start {
            return Err(bad("range end is below its start"));
        }
        out.extend((start..=stop).step_by(step));
    }
    Ok(out)
}

/// Default orders for a given `p`: `p/6, p/3, 2p/3, p − 1, p`, which is the
/// preset list at `p = 30`.
pub fn default_ps(p: usize) -> Vec<usize> {
    let mut ps: Vec<usize> = [p / 6, p / 3, 2 * p / 3, p.saturating_sub(1), p]
        .into_iter()
        .filter(|&v| v >= 1)
        .collect();
    ps.dedup();
    ps
}

/// Default sample counts `2, 4, …, 3p`, the preset grid at `p = 30`.
pub fn default_ns(p: usize) -> Vec<usize> {
    (1..=(3 * p).div_ceil(2)).map(|k| 2 * k).collect()
}

/// Applies `args` on top of the scenario preset.
pub fn resolve(args: &Args) -> Result<ScenarioConfig, CliError> {
    let id: ScenarioId = args.scenario.into();
    let mut cfg = ScenarioConfig::preset(id);

    if let Some(p) = args.p {
        if p == 0 {
            return Err(CliError::usage("--p must be positive"));
        }
        cfg.p = p;
        cfg.p_s_values = default_ps(p);
        cfg.n_values = default_ns(p);
        if id == ScenarioId::S2 {
            cfg.noise_variance = p as f64;
        }
    }
    if let Some(spec) = &args.ps {
        cfg.p_s_values = parse_list(spec)?;
    }
    if let Some(spec) = &args.n {
        cfg.n_values = parse_list(spec)?;
    }
    if let Some(m) = args.replicates {
        cfg.replicates = m;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(mode) = args.mode {
        cfg.mode = mode.into();
    }
    if let Some(s) = args.sigma_x2 {
        cfg.signal_variance = s;
    }
    if let Some(v) = args.sigma_v2 {
        cfg.noise_variance = v;
        if id == ScenarioId::S4 {
            cfg.assumed_noise_variance = v;
        }
    }
    if let Some(z) = args.sigma_z2 {
        let required = match id {
            ScenarioId::S1 | ScenarioId::S2 | ScenarioId::S3 => Some(0.0),
            ScenarioId::S4 => Some(cfg.noise_variance),
            ScenarioId::Custom => None,
        };
        if let Some(r) = required {
            if z != r {
                return Err(CliError::usage(format!(
                    "--sigma-z2 {z} contradicts scenario {id}, which assumes sigma_z^2 = {r}; use --scenario custom"
                )));
            }
        }
        cfg.assumed_noise_variance = z;
    }
    if let Some(kx) = args.kx {
        let rule = match kx {
            CovarianceArg::Identity => CovarianceRule::Identity,
            CovarianceArg::Randomized => CovarianceRule::Randomized,
        };
        if id != ScenarioId::Custom && rule != cfg.covariance {
            return Err(CliError::usage(format!(
                "--kx {} contradicts scenario {id}, which uses the {} covariance; use --scenario custom",
                rule.name(),
                cfg.covariance.name()
            )));
        }
        cfg.covariance = rule;
    }
    cfg.common_random_numbers = args.crn;
    if args.rcond.is_some() {
        cfg.rcond = args.rcond;
    }

    cfg.validate().map_err(|e| CliError::usage(e.to_string()))?;
    Ok(cfg)
}

/// `LMMSE_THREADS`: absent, empty or `0` means the default pool.
pub fn threads_from_env(value: Option<&str>) -> Result<Option<usize>, CliError> {
    match value.map(str::trim) {
        None | Some("") => Ok(None),
        Some(s) => match s.parse::<usize>() {
            Ok(0) => Ok(None),
            Ok(t) => Ok(Some(t)),
            Err(_) => Err(CliError::usage(format!("LMMSE_THREADS must be a nonnegative integer, got '{s}'"))),
        },
    }
}
