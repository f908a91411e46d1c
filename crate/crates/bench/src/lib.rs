//! Shared inputs for the benchmarks.

use lmmse_core::numkit::sample_gaussian_matrix;
use lmmse_core::{Matrix, RandomStream, ScenarioConfig, ScenarioId};

/// Standard normal `rows × cols` regressors from a fixed seed.
pub fn regressors(rows: usize, cols: usize, seed: u64) -> Matrix {
    sample_gaussian_matrix(rows, cols, &mut RandomStream::new(seed)).expect("positive dimensions")
}

/// Rank-deficient `n × n` Gram matrix `A Aᵀ` with `A` of shape `n × p`, `p < n`.
pub fn singular_gram(n: usize, p: usize, seed: u64) -> Matrix {
    let a = regressors(n, p, seed);
    &a * a.transpose()
}

/// S1 preset reduced to one `p_S` and a handful of sample counts.
pub fn small_sweep(replicates: usize) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::preset(ScenarioId::S1);
    cfg.p_s_values = vec![10, 30];
    cfg.n_values = vec![8, 20, 40, 60];
    cfg.replicates = replicates;
    cfg
}
