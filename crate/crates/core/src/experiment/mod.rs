//! Monte Carlo engine for the (p_S, n) experiments.
//!
//! Every replicate owns a [`RandomStream`](crate::numkit::RandomStream)
//! derived from `(seed, scenario, p_S, n, j)`, so a sweep produces the same
//! records no matter how its cells are scheduled.

mod cell;
mod moments;
mod record;
mod scenario;
mod sweep;

pub use cell::{run_baseline_cell, run_cell, BaselineEstimate, Experiment};
pub use moments::{estimate_complement_gram_mean, estimate_gram_pinv_mean, estimate_projection_mean};
pub use record::{RecordFlags, SweepRecord};
pub use scenario::{
    build_scenario_covariance, scenario_covariance, CovarianceRule, EstimatorMode, ScenarioConfig,
    ScenarioId, DEFAULT_SEED,
};
pub use sweep::{run_sweep, run_sweep_with_threads};

/// Sub-stream labels. The second label keeps the streams of different
/// consumers apart.
pub(crate) mod labels {
    pub const CELL: u64 = 1;
    pub const BASELINE: u64 = 2;
    pub const COVARIANCE: u64 = 3;
    pub const COMMON: u64 = 4;
}
