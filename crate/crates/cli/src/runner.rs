//! Drop execution: resolving a configuration into simulation inputs,
//! running Monte-Carlo ensembles and sweeping a parameter over a grid.
//!
//! Reproducibility rules:
//!
//! * Drop `k` always consumes the random stream `(seed, k)`, regardless of
//!   thread count or execution order, so ensembles are bit-reproducible and
//!   sweep grids share common random numbers drop for drop. Per-drop
//!   results are collected in drop order before any aggregation.
//! * Directional antennas aimed automatically keep the aim resolved from
//!   the base configuration; a sweep moves the reflector, not the mount.
//!
//! A sweep continues past grid values whose geometry is infeasible and
//! reports the error per value instead of failing the whole run.

use anyhow::{anyhow, bail, Result};
use rayon::prelude::*;

use eochan_core::antenna::AntennaArray;
use eochan_core::cir::{cluster_taps, combine_nlos, eo_coefficient, KeoFactor};
use eochan_core::clusters::{draw_lsps, generate_clusters, ScenarioParams};
use eochan_core::geometry::{eo_path_geometry, EoPathGeometry, LinkGeometry};
use eochan_core::materials::Material;
use eochan_core::metrics::rms_delay_spread;
use eochan_core::rng::drop_rng;

use crate::config::{Config, EoConfig};
use crate::scenario::ScenarioCatalog;

/// Parameter swept over a grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParameter {
    /// Power-partition factor of the reflector taps.
    KEo,
    /// Perpendicular receiver-to-reflector distance, m.
    DRx,
}

impl SweepParameter {
    pub fn label(self) -> &'static str {
        match self {
            SweepParameter::KEo => "k_eo",
            SweepParameter::DRx => "d_rx_m",
        }
    }

    pub fn default_grid(self) -> Vec<f64> {
        match self {
            SweepParameter::KEo => vec![0.1, 0.3, 0.5, 0.7, 0.9],
            SweepParameter::DRx => vec![3.25, 6.5, 13.0, 19.5],
        }
    }
}

/// A configuration resolved into core-library inputs, ready to run.
pub struct ResolvedRun {
    pub link: LinkGeometry,
    pub params: ScenarioParams,
    pub k: KeoFactor,
    pub reflectors: Vec<(EoPathGeometry, Material)>,
    pub tx: AntennaArray,
    pub rx: AntennaArray,
    pub time: f64,
    pub seed: u64,
    pub num_drops: u64,
}

/// Resolves `base`, optionally overriding the swept parameter.
///
/// Antennas are always built from `base` so that automatic boresight aims
/// stay fixed across a sweep.
pub fn resolve(
    base: &Config,
    catalog: &ScenarioCatalog,
    variation: Option<(SweepParameter, f64)>,
) -> Result<ResolvedRun> {
    let (tx, rx) = base.antennas()?;
    let mut cfg = base.clone();
    match variation {
        None => {}
        Some((SweepParameter::KEo, v)) => cfg.k_eo = v,
        Some((SweepParameter::DRx, v)) => {
            if cfg.environment_objects.is_empty() {
                bail!("d_rx sweep needs at least one environment object");
            }
            for eo in &mut cfg.environment_objects {
                match eo {
                    EoConfig::Offsets { d_rx, .. } => *d_rx = v,
                    EoConfig::Explicit { .. } => bail!(
                        "d_rx sweep requires offset-form environment objects"
                    ),
                }
            }
        }
    }
    let k = cfg.validate()?;
    let params = catalog.get(&cfg.scenario)?;
    let link = cfg.link_geometry()?;
    let mut reflectors = Vec::with_capacity(cfg.environment_objects.len());
    for (i, eo) in cfg.environment_objects.iter().enumerate() {
        let geom = eo_path_geometry(&link, &eo.plane())
            .map_err(|e| anyhow!("environment object {i}: {e}"))?;
        let material = cfg.material(eo.material_name())?;
        reflectors.push((geom, material));
    }
    Ok(ResolvedRun {
        link,
        params,
        k,
        reflectors,
        tx,
        rx,
        time: cfg.time_s,
        seed: cfg.seed,
        num_drops: cfg.num_drops,
    })
}

/// Result of a single drop.
pub struct DropOutcome {
    /// RMS delay spread of the combined response, s.
    pub delay_spread: f64,
    /// `(delay, power)` taps of the combined response.
    pub taps: Vec<(f64, f64)>,
}

/// Runs one drop on its dedicated random stream.
pub fn run_drop(run: &ResolvedRun, drop_index: u64) -> Result<DropOutcome> {
    let mut rng = drop_rng(run.seed, drop_index);
    let lsps = draw_lsps(&run.params, &mut rng)?;
    let clusters = generate_clusters(&lsps, &run.params, &mut rng)?;
    let stochastic = cluster_taps(&clusters, &run.link, &run.tx, &run.rx, run.time)?;
    let mut reflector_taps = Vec::with_capacity(run.reflectors.len());
    for (geom, material) in &run.reflectors {
        reflector_taps
            .push(eo_coefficient(&run.link, geom, material, &run.tx, &run.rx, run.time)?);
    }
    let cir = combine_nlos(reflector_taps, stochastic, run.k, run.time)?;
    let taps = cir.delay_power_pairs();
    let delay_spread = rms_delay_spread(&taps)?;
    Ok(DropOutcome { delay_spread, taps })
}

/// Runs the full ensemble in parallel, returning outcomes in drop order.
pub fn run_ensemble(run: &ResolvedRun) -> Result<Vec<DropOutcome>> {
    let results: Vec<Result<DropOutcome>> =
        (0..run.num_drops).into_par_iter().map(|k| run_drop(run, k)).collect();
    results.into_iter().collect()
}

/// Ensemble outcome for one grid value, or the reason it could not run.
pub struct SweepValue {
    pub grid_value: f64,
    pub result: Result<Vec<DropOutcome>, String>,
}

/// Sweeps `parameter` over `grid`, sharing random streams across values.
pub fn run_sweep(
    base: &Config,
    catalog: &ScenarioCatalog,
    parameter: SweepParameter,
    grid: &[f64],
) -> Result<Vec<SweepValue>> {
    if grid.is_empty() {
        bail!("sweep grid is empty");
    }
    let mut out = Vec::with_capacity(grid.len());
    for &value in grid {
        let result = resolve(base, catalog, Some((parameter, value)))
            .and_then(|run| run_ensemble(&run))
            .map_err(|e| format!("{e:#}"));
        out.push(SweepValue { grid_value: value, result });
    }
    Ok(out)
}
