//! CSV contract shared by experiments and bound reports.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

pub const TRAJECTORY_HEADER: &str =
    "run_id,t,super_arm,realized_reward,expected_reward,regret,cumulative_regret,oracle_failed";
pub const AGGREGATE_HEADER: &str = "kind,label,t,runs,mean_cumulative_regret,stderr_cumulative_regret";

/// Decimal rendering with 12 significant digits.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRecord {
    pub run_id: u32,
    pub t: u64,
    pub super_arm: usize,
    pub realized_reward: f64,
    pub expected_reward: f64,
    pub regret: f64,
    pub cumulative_regret: f64,
    pub oracle_failed: bool,
}

impl TrajectoryRecord {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.run_id,
            self.t,
            self.super_arm,
            fmt_num(self.realized_reward),
            fmt_num(self.expected_reward),
            fmt_num(self.regret),
            fmt_num(self.cumulative_regret),
            u8::from(self.oracle_failed)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateRow {
    pub kind: String,
    pub label: String,
    pub t: u64,
    pub runs: u32,
    pub mean: f64,
    pub stderr: f64,
}

impl AggregateRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.kind,
            self.label,
            self.t,
            self.runs,
            fmt_num(self.mean),
            fmt_num(self.stderr)
        )
    }
}

/// Powers of two up to `n`, then `n` itself.
pub fn checkpoints(n: u64) -> Vec<u64> {
    let mut out: Vec<u64> = std::iter::successors(Some(1u64), |t| t.checked_mul(2))
        .take_while(|&t| t <= n)
        .collect();
    if out.last() != Some(&n) {
        out.push(n);
    }
    out
}

/// Mean and standard error of the mean (zero for a single sample).
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

pub fn write_lines(path: &Path, header: &str, lines: impl IntoIterator<Item = String>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{header}")?;
    for line in lines {
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(())
}
