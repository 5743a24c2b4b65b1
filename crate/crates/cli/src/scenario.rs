//! Scenario catalog: named stochastic-parameter sets loaded from TOML.
//!
//! A catalog maps scenario names to the full [`ScenarioParams`] of the
//! cluster generator. The default catalog is compiled into the binary;
//! an alternative file can be supplied on the command line.

use std::collections::BTreeMap;

use anyhow::{anyhow, Context, Result};
use serde::Deserialize;

use eochan_core::clusters::ScenarioParams;

/// The catalog bundled with the binary.
pub const BUNDLED_CATALOG: &str = include_str!("../data/scenarios.toml");

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioEntry {
    ds_log_mean: f64,
    ds_log_std: f64,
    asa_log_mean: f64,
    asa_log_std: f64,
    asd_log_mean: f64,
    asd_log_std: f64,
    zsa_log_mean: f64,
    zsa_log_std: f64,
    zod_offset_deg: f64,
    num_clusters: usize,
    rays_per_cluster: usize,
    delay_scaling: f64,
    shadowing_std_db: f64,
    cluster_asd_deg: f64,
    cluster_asa_deg: f64,
    cluster_zsa_deg: f64,
}

impl From<&ScenarioEntry> for ScenarioParams {
    fn from(e: &ScenarioEntry) -> Self {
        ScenarioParams {
            ds_log_mean: e.ds_log_mean,
            ds_log_std: e.ds_log_std,
            asa_log_mean: e.asa_log_mean,
            asa_log_std: e.asa_log_std,
            asd_log_mean: e.asd_log_mean,
            asd_log_std: e.asd_log_std,
            zsa_log_mean: e.zsa_log_mean,
            zsa_log_std: e.zsa_log_std,
            zod_offset_deg: e.zod_offset_deg,
            num_clusters: e.num_clusters,
            rays_per_cluster: e.rays_per_cluster,
            delay_scaling: e.delay_scaling,
            shadowing_std_db: e.shadowing_std_db,
            cluster_asd_deg: e.cluster_asd_deg,
            cluster_asa_deg: e.cluster_asa_deg,
            cluster_zsa_deg: e.cluster_zsa_deg,
        }
    }
}

/// Named scenario parameter sets.
pub struct ScenarioCatalog {
    entries: BTreeMap<String, ScenarioEntry>,
}

impl ScenarioCatalog {
    /// Parses a catalog from TOML text and validates every entry.
    pub fn parse(text: &str) -> Result<Self> {
        let entries: BTreeMap<String, ScenarioEntry> =
            toml::from_str(text).context("parsing scenario catalog")?;
        if entries.is_empty() {
            return Err(anyhow!("scenario catalog is empty"));
        }
        for (name, entry) in &entries {
            ScenarioParams::from(entry)
                .validate()
                .map_err(|e| anyhow!("scenario {name:?}: {e}"))?;
        }
        Ok(ScenarioCatalog { entries })
    }

    /// The compiled-in catalog.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_CATALOG).expect("bundled catalog is valid")
    }

    pub fn get(&self, name: &str) -> Result<ScenarioParams> {
        self.entries
            .get(name)
            .map(ScenarioParams::from)
            .ok_or_else(|| {
                let known: Vec<&str> = self.entries.keys().map(String::as_str).collect();
                anyhow!("unknown scenario {name:?}; catalog has: {}", known.join(", "))
            })
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}
