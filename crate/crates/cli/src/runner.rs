//! Experiment execution: one output directory per protocol, a merged
//! comparison file when several protocols run side by side.

use std::path::Path;

use overlay_heal_core::batch::{mean_rows, run_batch};
use overlay_heal_core::engine::RunResult;
use overlay_heal_core::protocol::ProtocolKind;

use crate::config::ExperimentConfig;
use crate::output;
use crate::HarnessError;

fn ensure_dir(path: &Path) -> Result<(), HarnessError> {
    std::fs::create_dir_all(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Runs one protocol of the experiment and writes `run_<i>.csv`, `mean.csv`
/// and `summary.txt` into `dir`.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    kind: ProtocolKind,
    dir: &Path,
) -> Result<Vec<RunResult>, HarnessError> {
    ensure_dir(dir)?;
    let protocol = cfg.protocol_for(kind);
    let results = run_batch(&cfg.topology, &protocol, &cfg.scenario)?;
    for result in &results {
        let path = dir.join(format!("run_{}.csv", result.run_index));
        output::write_file(&path, &output::metrics_csv(&result.rows))?;
    }
    output::write_file(&dir.join("mean.csv"), &output::mean_csv(&mean_rows(&results)))?;
    output::write_file(&dir.join("summary.txt"), &output::summary_text(&results))?;
    Ok(results)
}

/// Entry point used by the binary: a single protocol writes into `out`
/// directly; several write into per-protocol subdirectories plus a merged
/// `compare.csv`. All protocols share the victim sub-streams, so random
/// churn is identical across them.
pub fn execute(cfg: &ExperimentConfig) -> Result<(), HarnessError> {
    if let [kind] = cfg.protocols[..] {
        run_experiment(cfg, kind, &cfg.out)?;
        return Ok(());
    }
    let mut sections = Vec::with_capacity(cfg.protocols.len());
    for &kind in &cfg.protocols {
        let dir = cfg.out.join(kind.to_string());
        let results = run_experiment(cfg, kind, &dir)?;
        sections.push((kind.to_string(), mean_rows(&results)));
    }
    ensure_dir(&cfg.out)?;
    output::write_file(&cfg.out.join("compare.csv"), &output::compare_csv(&sections))
}
