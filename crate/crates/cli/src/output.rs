//! File emission. The CSV schema is a contract: exact header, step as an
//! integer, every metric with six fractional digits, `\n` line endings.

use std::fmt::Write as _;
use std::path::Path;

use overlay_heal_core::batch::MeanRow;
use overlay_heal_core::engine::RunResult;
use overlay_heal_core::MetricsRow;

use crate::HarnessError;

pub const CSV_HEADER: &str = "step,main_component_size,main_component_fraction,\
isolated_count,avg_deg1,avg_deg2,clustering,diameter,mean_degree_gap";

fn push_values(buf: &mut String, step: u32, values: &[f64; 8]) {
    write!(buf, "{step}").unwrap();
    for v in values {
        write!(buf, ",{v:.6}").unwrap();
    }
    buf.push('\n');
}

pub fn metrics_csv(rows: &[MetricsRow]) -> String {
    let mut buf = String::with_capacity(64 * (rows.len() + 1));
    buf.push_str(CSV_HEADER);
    buf.push('\n');
    for row in rows {
        push_values(&mut buf, row.step, &row.values());
    }
    buf
}

pub fn mean_csv(rows: &[MeanRow]) -> String {
    let mut buf = String::with_capacity(64 * (rows.len() + 1));
    buf.push_str(CSV_HEADER);
    buf.push('\n');
    for row in rows {
        push_values(&mut buf, row.step, &row.values);
    }
    buf
}

/// Merged per-protocol means with the protocol name as the first column,
/// sections in the order the protocols were requested.
pub fn compare_csv(sections: &[(String, Vec<MeanRow>)]) -> String {
    let mut buf = String::new();
    buf.push_str("protocol,");
    buf.push_str(CSV_HEADER);
    buf.push('\n');
    for (name, rows) in sections {
        for row in rows {
            write!(buf, "{name},{}", row.step).unwrap();
            for v in &row.values {
                write!(buf, ",{v:.6}").unwrap();
            }
            buf.push('\n');
        }
    }
    buf
}

const COLUMN_NAMES: [&str; 8] = [
    "main_component_size",
    "main_component_fraction",
    "isolated_count",
    "avg_deg1",
    "avg_deg2",
    "clustering",
    "diameter",
    "mean_degree_gap",
];

/// Final-step statistics: each run contributes its last row; the summary
/// reports per-column mean and population standard deviation.
pub fn summary_text(results: &[RunResult]) -> String {
    let finals: Vec<[f64; 8]> = results
        .iter()
        .filter_map(|r| r.rows.last().map(|row| row.values()))
        .collect();
    let n = finals.len() as f64;
    let last_steps: Vec<u32> = results
        .iter()
        .filter_map(|r| r.rows.last().map(|row| row.step))
        .collect();
    let mut buf = String::new();
    writeln!(buf, "runs={}", results.len()).unwrap();
    writeln!(
        buf,
        "final_step_min={} final_step_max={}",
        last_steps.iter().min().copied().unwrap_or(0),
        last_steps.iter().max().copied().unwrap_or(0)
    )
    .unwrap();
    for (i, name) in COLUMN_NAMES.iter().enumerate() {
        let mean = finals.iter().map(|v| v[i]).sum::<f64>() / n;
        let var = finals.iter().map(|v| (v[i] - mean).powi(2)).sum::<f64>() / n;
        writeln!(buf, "{name}: mean={mean:.6} stddev={:.6}", var.sqrt()).unwrap();
    }
    buf
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), HarnessError> {
    std::fs::write(path, contents).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}
