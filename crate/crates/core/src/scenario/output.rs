//! CSV time series, tables and run summaries.

use super::config::ScenarioConfig;
use super::run::{run, Row, RunSummary, COLUMNS};
use crate::error::{Error, Result};
use serde::Serialize;
use std::path::{Path, PathBuf};

fn io(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

/// Writes a CSV table with one header row; values use the shortest
/// round-trip representation, so output is reproducible bit for bit.
pub fn write_table<S: AsRef<str>>(path: &Path, header: &[S], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io(path, e))?;
    w.write_record(header.iter().map(|h| h.as_ref())).map_err(|e| io(path, e))?;
    for row in rows {
        w.write_record(row.iter().map(|v| format!("{v:e}"))).map_err(|e| io(path, e))?;
    }
    w.flush().map_err(|e| io(path, e))
}

/// Writes every `every`-th row plus the last one.
pub fn write_rows(path: &Path, rows: &[Row], every: usize) -> Result<()> {
    let every = every.max(1);
    let last = rows.len().saturating_sub(1);
    let kept = rows.iter().enumerate().filter(|(k, _)| k % every == 0 || *k == last).map(|(_, r)| r.values());
    write_table(path, &COLUMNS, kept)
}

pub fn write_toml(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = toml::to_string(value).map_err(|e| io(path, e))?;
    std::fs::write(path, text).map_err(|e| io(path, e))
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))
}

/// Runs a scenario and writes `<name>.csv` and `<name>_summary.toml` into
/// `out`. Returns the summary and the path of the time series.
pub fn run_case(cfg: &ScenarioConfig, out: &Path) -> Result<(RunSummary, PathBuf)> {
    let result = run(cfg)?;
    ensure_dir(out)?;
    let csv = out.join(format!("{}.csv", cfg.name));
    write_rows(&csv, &result.rows, cfg.output.every)?;
    write_toml(&out.join(format!("{}_summary.toml", cfg.name)), &result.summary)?;
    Ok((result.summary, csv))
}
