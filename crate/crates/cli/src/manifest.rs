//! JSON sidecar describing how a CSV was produced.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use lmmse_core::{ScenarioConfig, SweepRecord};
use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub scenario: String,
    pub p: usize,
    pub signal_variance: f64,
    pub noise_variance: f64,
    pub assumed_noise_variance: f64,
    pub covariance: String,
    pub p_s_values: Vec<usize>,
    pub n_values: Vec<usize>,
    pub replicates: usize,
    pub mode: String,
    pub common_random_numbers: bool,
    pub rcond: Option<f64>,
}

impl From<&ScenarioConfig> for ConfigEcho {
    fn from(cfg: &ScenarioConfig) -> Self {
        let (p_s_values, n_values) = cfg.canonical_grid();
        ConfigEcho {
            scenario: cfg.scenario.to_string(),
            p: cfg.p,
            signal_variance: cfg.signal_variance,
            noise_variance: cfg.noise_variance,
            assumed_noise_variance: cfg.assumed_noise_variance,
            covariance: cfg.covariance.name().to_string(),
            p_s_values,
            n_values,
            replicates: cfg.replicates,
            mode: cfg.mode.to_string(),
            common_random_numbers: cfg.common_random_numbers,
            rcond: cfg.rcond,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CellSeed {
    pub p_s: usize,
    pub n: usize,
    pub baseline: bool,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub master_seed: u64,
    /// Seconds since the Unix epoch.
    pub created: u64,
    /// Worker count requested through `LMMSE_THREADS`; results do not depend on it.
    pub threads: Option<usize>,
    pub config: ConfigEcho,
    pub cells: Vec<CellSeed>,
}

impl RunManifest {
    pub fn new(cfg: &ScenarioConfig, records: &[SweepRecord], threads: Option<usize>) -> Self {
        let created = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        RunManifest {
            tool: "lmmse-mismatch",
            version: env!("CARGO_PKG_VERSION"),
            master_seed: cfg.seed,
            created,
            threads,
            config: cfg.into(),
            cells: records
                .iter()
                .map(|r| CellSeed {
                    p_s: r.p_s,
                    n: r.n,
                    baseline: r.is_baseline(),
                    seed: r.seed,
                    error: r.error.clone(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest fields are serializable")
    }
}

/// `<csv path>.manifest`.
pub fn manifest_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".manifest");
    PathBuf::from(s)
}

pub fn write_manifest(manifest: &RunManifest, path: &Path) -> Result<(), CliError> {
    std::fs::write(path, manifest.to_json() + "\n").map_err(|e| CliError::io(path, e))
}
