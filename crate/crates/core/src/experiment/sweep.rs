use rayon::prelude::*;

use super::cell::Experiment;
use super::record::SweepRecord;
use super::scenario::ScenarioConfig;
use crate::error::{Error, Result};

impl Experiment {
    /// All baseline rows (one per `n`) followed by all cells, sorted by
    /// `p_S` then `n`. Cells run on the current rayon pool.
    pub fn sweep(&self) -> Vec<SweepRecord> {
        let (ps, ns) = self.config().canonical_grid();
        let baselines: Vec<SweepRecord> = ns.par_iter().map(|&n| self.baseline_record(n)).collect();
        let grid: Vec<(usize, usize)> = ps
            .iter()
            .flat_map(|&p_s| ns.iter().map(move |&n| (p_s, n)))
            .collect();
        let mut cells: Vec<SweepRecord> = grid
            .par_iter()
            .map(|&(p_s, n)| self.cell_record(p_s, n))
            .collect();
        for cell in &mut cells {
            let idx = ns.binary_search(&cell.n).expect("n from the grid");
            cell.baseline_mse = baselines[idx].baseline_mse;
        }
        let mut records = baselines;
        records.extend(cells);
        records
    }
}

pub fn run_sweep(cfg: &ScenarioConfig) -> Result<Vec<SweepRecord>> {
    run_sweep_with_threads(cfg, None)
}

/// [`run_sweep`] on a dedicated pool of `threads` workers; `None` or `Some(0)`
/// uses the global pool. Output does not depend on the thread count.
pub fn run_sweep_with_threads(cfg: &ScenarioConfig, threads: Option<usize>) -> Result<Vec<SweepRecord>> {
    let experiment = Experiment::new(cfg.clone())?;
    match threads {
        Some(t) if t > 0 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::InvalidArgument(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(|| experiment.sweep()))
        }
        _ => Ok(experiment.sweep()),
    }
}
