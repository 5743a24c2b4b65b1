//! Power-angle table analysis: per-scatterer power proportions.
//!
//! Takes an angle-resolved scatterer power table (see
//! [`ScattererPowerTable`] for the format), sums each scatterer column over
//! angle and reports its share of the total target power. A bundled example
//! table ships with the binary for a quick self-check.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use eochan_core::metrics::ScattererPowerTable;

use crate::output::ToolInfo;

/// The example table compiled into the binary.
pub const BUNDLED_TABLE: &str = include_str!("../data/padp_case1.csv");

#[derive(Serialize)]
pub struct Proportion {
    pub name: String,
    pub proportion: f64,
}

/// Machine-readable analysis record.
#[derive(Serialize)]
pub struct PadpReport {
    pub tool: ToolInfo,
    pub source: String,
    pub angle_rows: usize,
    pub proportions: Vec<Proportion>,
    pub proportion_sum: f64,
}

/// Analyzes table text (as read from `source`, used only for labeling).
pub fn analyze(text: &str, source: &str) -> Result<PadpReport> {
    let table = ScattererPowerTable::parse(text)
        .with_context(|| format!("reading power table {source}"))?;
    let proportions = table
        .power_proportions()
        .context("computing power proportions")?
        .into_iter()
        .map(|(name, proportion)| Proportion { name, proportion })
        .collect::<Vec<_>>();
    let proportion_sum = proportions.iter().map(|p| p.proportion).sum();
    Ok(PadpReport {
        tool: ToolInfo::default(),
        source: source.to_string(),
        angle_rows: table.num_rows(),
        proportions,
        proportion_sum,
    })
}

/// Human-readable table for stdout.
pub fn format_report(report: &PadpReport) -> String {
    let width = report
        .proportions
        .iter()
        .map(|p| p.name.len())
        .chain(["scatterer".len(), "total".len()])
        .max()
        .unwrap_or(9);
    let mut out = String::new();
    let _ = writeln!(out, "{:<width$}  proportion", "scatterer");
    for p in &report.proportions {
        let _ = writeln!(out, "{:<width$}  {:.6}", p.name, p.proportion);
    }
    let _ = writeln!(out, "{:<width$}  {:.6}", "total", report.proportion_sum);
    let _ = writeln!(out, "angle rows: {}", report.angle_rows);
    out
}

pub fn write_report(dir: &Path, report: &PadpReport) -> Result<()> {
    let mut text =
        serde_json::to_string_pretty(report).context("serializing analysis report")?;
    text.push('\n');
    let path = dir.join("padp_report.json");
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
