//! Batch execution across run indices, parallel when the `parallel` feature
//! is enabled, plus per-step averaging of the results.

use crate::engine::{run_single, EngineError, RunResult, ScenarioSpec};
use crate::protocol::ProtocolConfig;
use crate::topology::TopologySpec;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Runs `scenario.runs` independent simulations. Results come back ordered
/// by run index and are bit-identical to the sequential path.
pub fn run_batch(
    spec: &TopologySpec,
    protocol: &ProtocolConfig,
    scenario: &ScenarioSpec,
) -> Result<Vec<RunResult>, EngineError> {
    scenario.validate()?;
    #[cfg(feature = "parallel")]
    {
        (0..scenario.runs)
            .into_par_iter()
            .map(|i| run_single(spec, protocol, scenario, i))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_batch_sequential(spec, protocol, scenario)
    }
}

/// Single-threaded batch runner; the reference the parallel path must match.
pub fn run_batch_sequential(
    spec: &TopologySpec,
    protocol: &ProtocolConfig,
    scenario: &ScenarioSpec,
) -> Result<Vec<RunResult>, EngineError> {
    scenario.validate()?;
    (0..scenario.runs)
        .map(|i| run_single(spec, protocol, scenario, i))
        .collect()
}

/// Per-step mean of the eight metric columns.
#[derive(Clone, Debug, PartialEq)]
pub struct MeanRow {
    pub step: u32,
    pub values: [f64; 8],
}

/// Averages metric rows across runs. Runs may end early (failures-only), so
/// each step averages only the runs that reached it.
pub fn mean_rows(results: &[RunResult]) -> Vec<MeanRow> {
    let max_len = results.iter().map(|r| r.rows.len()).max().unwrap_or(0);
    let mut out = Vec::with_capacity(max_len);
    for i in 0..max_len {
        let mut sum = [0.0f64; 8];
        let mut count = 0usize;
        let mut step = 0u32;
        for r in results {
            if let Some(row) = r.rows.get(i) {
                step = row.step;
                for (acc, v) in sum.iter_mut().zip(row.values()) {
                    *acc += v;
                }
                count += 1;
            }
        }
        let mut values = [0.0f64; 8];
        for (out_v, s) in values.iter_mut().zip(sum) {
            *out_v = s / count as f64;
        }
        out.push(MeanRow { step, values });
    }
    out
}
