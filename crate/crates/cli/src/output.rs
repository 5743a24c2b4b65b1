//! Deterministic output writers.
//!
//! All files are plain text with fixed field formatting and no timestamps
//! or environment-dependent content, so a run with identical inputs always
//! produces byte-identical outputs regardless of thread count.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use eochan_core::metrics::{empirical_cdf, Pdp};

use crate::config::Config;
use crate::runner::DropOutcome;

/// Writes `content` to `dir/name` and records the name.
fn write_file(dir: &Path, name: &str, content: &str, written: &mut Vec<String>) -> Result<()> {
    let path: PathBuf = dir.join(name);
    fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
    written.push(name.to_string());
    Ok(())
}

/// Power delay profile as `delay_ns,power_db` over occupied bins, powers in
/// dB relative to the total profile power, delays at bin centers.
pub fn render_pdp_csv(pdp: &Pdp) -> String {
    let total = pdp.total_power();
    let mut out = String::from("delay_ns,power_db\n");
    for (center, power) in pdp.occupied() {
        let db = 10.0 * (power / total).log10();
        let _ = writeln!(out, "{:.6},{:.6}", center * 1e9, db);
    }
    out
}

pub fn write_pdp_csv(
    dir: &Path,
    pdp: &Pdp,
    written: &mut Vec<String>,
) -> Result<()> {
    write_file(dir, "pdp.csv", &render_pdp_csv(pdp), written)
}

/// Per-drop delay spreads as `grid_value,drop_index,ds_ns`.
pub fn render_ds_samples_csv(values: &[(f64, &[DropOutcome])]) -> String {
    let mut out = String::from("grid_value,drop_index,ds_ns\n");
    for (grid_value, outcomes) in values {
        for (idx, outcome) in outcomes.iter().enumerate() {
            let _ =
                writeln!(out, "{},{},{:.6}", grid_value, idx, outcome.delay_spread * 1e9);
        }
    }
    out
}

pub fn write_ds_samples_csv(
    dir: &Path,
    values: &[(f64, &[DropOutcome])],
    written: &mut Vec<String>,
) -> Result<()> {
    write_file(dir, "ds_samples.csv", &render_ds_samples_csv(values), written)
}

/// Empirical distributions as `grid_value,ds_ns,cum_prob`.
pub fn render_ds_cdf_csv(values: &[(f64, &[DropOutcome])]) -> Result<String> {
    let mut out = String::from("grid_value,ds_ns,cum_prob\n");
    for (grid_value, outcomes) in values {
        let samples: Vec<f64> = outcomes.iter().map(|o| o.delay_spread * 1e9).collect();
        let cdf = empirical_cdf(&samples).context("delay-spread distribution")?;
        for (value, prob) in cdf.points() {
            let _ = writeln!(out, "{},{:.6},{:.6}", grid_value, value, prob);
        }
    }
    Ok(out)
}

pub fn write_ds_cdf_csv(
    dir: &Path,
    values: &[(f64, &[DropOutcome])],
    written: &mut Vec<String>,
) -> Result<()> {
    write_file(dir, "ds_cdf.csv", &render_ds_cdf_csv(values)?, written)
}

#[derive(Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

impl Default for ToolInfo {
    fn default() -> Self {
        ToolInfo { name: "eochan", version: env!("CARGO_PKG_VERSION") }
    }
}

/// Ensemble statistics for one grid value.
#[derive(Serialize)]
pub struct GridSummary {
    pub grid_value: f64,
    pub drops: usize,
    pub mean_ds_ns: f64,
    pub median_ds_ns: f64,
}

impl GridSummary {
    pub fn from_outcomes(grid_value: f64, outcomes: &[DropOutcome]) -> Result<Self> {
        let samples: Vec<f64> = outcomes.iter().map(|o| o.delay_spread * 1e9).collect();
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        let median = empirical_cdf(&samples).context("summary distribution")?.quantile(0.5);
        Ok(GridSummary {
            grid_value,
            drops: outcomes.len(),
            mean_ds_ns: mean,
            median_ds_ns: median,
        })
    }
}

/// Grid values that could not run, with the reason.
#[derive(Serialize)]
pub struct GridError {
    pub grid_value: f64,
    pub error: String,
}

/// Machine-readable run record. Contains no timestamps: identical inputs
/// must serialize identically.
#[derive(Serialize)]
pub struct RunReport<'a> {
    pub tool: ToolInfo,
    pub command: &'static str,
    pub sweep_parameter: Option<&'static str>,
    pub grid: Vec<f64>,
    pub config: &'a Config,
    pub summary: Vec<GridSummary>,
    pub errors: Vec<GridError>,
    pub outputs: Vec<String>,
}

pub fn write_run_report(dir: &Path, report: &RunReport) -> Result<()> {
    let mut text =
        serde_json::to_string_pretty(report).context("serializing run report")?;
    text.push('\n');
    let path = dir.join("run.json");
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
