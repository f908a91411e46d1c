use std::fmt;
use std::str::FromStr;

use super::{EstimatorMode, ScenarioId};
use crate::error::Error;

/// Per-record annotations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RecordFlags {
    /// Row holds the full-LMMSE baseline rather than a partial-model cell.
    pub baseline: bool,
    /// `|n − p_S| ≤ 1`: the closed form is infinite and draws are heavy-tailed.
    pub near_interpolation: bool,
    /// Only one replicate, so the standard error is reported as 0.
    pub degenerate_stderr: bool,
    /// The cell aborted; numeric fields are NaN.
    pub failed: bool,
}

impl RecordFlags {
    const TOKENS: [&'static str; 4] = ["baseline", "near-interpolation", "degenerate-stderr", "failed"];

    fn bits(&self) -> [bool; 4] {
        [self.baseline, self.near_interpolation, self.degenerate_stderr, self.failed]
    }

    pub fn is_empty(&self) -> bool {
        !self.bits().iter().any(|&b| b)
    }
}

/// `;`-separated tokens in a fixed order, empty when no flag is set.
impl fmt::Display for RecordFlags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (token, set) in Self::TOKENS.iter().zip(self.bits()) {
            if set {
                if !first {
                    f.write_str(";")?;
                }
                f.write_str(token)?;
                first = false;
            }
        }
        Ok(())
    }
}

impl FromStr for RecordFlags {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let mut flags = RecordFlags::default();
        for token in s.split(';').filter(|t| !t.is_empty()) {
            match token {
                "baseline" => flags.baseline = true,
                "near-interpolation" => flags.near_interpolation = true,
                "degenerate-stderr" => flags.degenerate_stderr = true,
                "failed" => flags.failed = true,
                other => return Err(Error::InvalidInput(format!("unknown flag '{other}'"))),
            }
        }
        Ok(flags)
    }
}

/// Result of one grid cell, or of the full-LMMSE baseline at one `n`
/// (`flags.baseline`, `p_s == 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub scenario: ScenarioId,
    pub p: usize,
    pub p_s: usize,
    pub n: usize,
    pub replicates: usize,
    pub mode: EstimatorMode,
    /// Average whole-vector MSE over the replicates.
    pub empirical_mse: f64,
    pub stderr: f64,
    /// Closed-form expected whole-vector MSE; `None` when the assumed model
    /// is outside the closed form's conditions. May be `+∞`.
    pub analytic_mse: Option<f64>,
    /// Empirical full-LMMSE MSE at the same `n`, when a sweep computed it.
    pub baseline_mse: Option<f64>,
    /// `None` on baseline rows.
    pub gamma: Option<f64>,
    pub flags: RecordFlags,
    /// Seed of the stream family this record's replicates were drawn from.
    pub seed: u64,
    /// Diagnostic of a failed cell.
    pub error: Option<String>,
}

impl SweepRecord {
    pub fn is_baseline(&self) -> bool {
        self.flags.baseline
    }
}
