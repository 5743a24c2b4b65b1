//! Run configuration: JSON schema, defaults and semantic validation.
//!
//! A configuration resolves into the core-library inputs for one simulation
//! run: link geometry, environment objects with materials, antennas, the
//! power-partition factor, scenario name and sampling controls. The
//! built-in default models a street-canyon link at 26 GHz with a single
//! concrete wall reflector six and a half meters to the side of both
//! terminals.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use eochan_core::antenna::{AntennaArray, ArrayLayout, ElementPattern};
use eochan_core::cir::KeoFactor;
use eochan_core::geometry::{
    eo_path_geometry, EoPlane, LinkGeometry, SphericalAngles, Vec3,
};
use eochan_core::materials::Material;

/// Default bin width: the delay resolution of a 600 MHz sounding bandwidth.
pub const DEFAULT_BIN_WIDTH_S: f64 = 1.0 / 600.0e6;

fn default_vel() -> [f64; 3] {
    [0.0, 0.0, 0.0]
}

fn default_seed() -> u64 {
    1
}

fn default_drops() -> u64 {
    1000
}

fn default_scenario() -> String {
    "umi-street-canyon-nlos".into()
}

fn default_bin_width() -> f64 {
    DEFAULT_BIN_WIDTH_S
}

fn default_antenna() -> AntennaConfig {
    AntennaConfig::Isotropic
}

/// Link endpoint placement and carrier.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct LinkConfig {
    pub tx_pos: [f64; 3],
    pub rx_pos: [f64; 3],
    #[serde(default = "default_vel")]
    pub tx_vel: [f64; 3],
    #[serde(default = "default_vel")]
    pub rx_vel: [f64; 3],
    pub carrier_freq_hz: f64,
}

/// One environment object: a vertical planar reflector and its surface
/// material, either by perpendicular offsets from the terminals or as an
/// explicit plane.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum EoConfig {
    Offsets { d_tx: f64, d_rx: f64, material: String },
    Explicit { point: [f64; 3], normal: [f64; 3], material: String },
}

impl EoConfig {
    pub fn material_name(&self) -> &str {
        match self {
            EoConfig::Offsets { material, .. } | EoConfig::Explicit { material, .. } => material,
        }
    }

    pub fn plane(&self) -> EoPlane {
        match *self {
            EoConfig::Offsets { d_tx, d_rx, .. } => EoPlane::Offsets { d_tx, d_rx },
            EoConfig::Explicit { point, normal, .. } => EoPlane::Explicit {
                point: vec3(point),
                normal: vec3(normal),
            },
        }
    }
}

/// Boresight direction in degrees.
#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BoresightConfig {
    pub zenith_deg: f64,
    pub azimuth_deg: f64,
}

/// Antenna description. A directional antenna without an explicit boresight
/// is aimed at the reflection direction of the first environment object.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "pattern", rename_all = "snake_case", deny_unknown_fields)]
pub enum AntennaConfig {
    Isotropic,
    Directional {
        azimuth_hpbw_deg: f64,
        zenith_hpbw_deg: f64,
        #[serde(default = "default_max_attenuation")]
        max_attenuation_db: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        boresight: Option<BoresightConfig>,
    },
}

fn default_max_attenuation() -> f64 {
    30.0
}

/// Custom material parameters overlaying the builtin presets.
#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConfig {
    pub eps_real: f64,
    pub conductivity: f64,
}

/// Full run configuration as read from JSON.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub link: LinkConfig,
    pub environment_objects: Vec<EoConfig>,
    pub k_eo: f64,
    #[serde(default = "default_scenario")]
    pub scenario: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_drops")]
    pub num_drops: u64,
    #[serde(default = "default_bin_width")]
    pub bin_width_s: f64,
    #[serde(default)]
    pub time_s: f64,
    #[serde(default = "default_antenna")]
    pub tx_antenna: AntennaConfig,
    #[serde(default = "default_antenna")]
    pub rx_antenna: AntennaConfig,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub materials: BTreeMap<String, MaterialConfig>,
}

fn vec3(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

impl Default for Config {
    fn default() -> Self {
        Config {
            link: LinkConfig {
                tx_pos: [0.0, 0.0, 1.6],
                rx_pos: [0.0, 26.0, 1.6],
                tx_vel: default_vel(),
                rx_vel: default_vel(),
                carrier_freq_hz: 26.0e9,
            },
            environment_objects: vec![EoConfig::Offsets {
                d_tx: 6.5,
                d_rx: 6.5,
                material: "concrete".into(),
            }],
            k_eo: 0.5,
            scenario: default_scenario(),
            seed: default_seed(),
            num_drops: default_drops(),
            bin_width_s: default_bin_width(),
            time_s: 0.0,
            tx_antenna: default_antenna(),
            rx_antenna: default_antenna(),
            materials: BTreeMap::new(),
        }
    }
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("parsing configuration JSON")
    }

    /// Resolves a material name against the overrides, then the presets.
    pub fn material(&self, name: &str) -> Result<Material> {
        if let Some(m) = self.materials.get(name) {
            return Ok(Material::Dielectric {
                eps_real: m.eps_real,
                conductivity: m.conductivity,
            });
        }
        Material::preset(name)
            .ok_or_else(|| anyhow!("unknown material {name:?}; add it to \"materials\""))
    }

    pub fn link_geometry(&self) -> Result<LinkGeometry> {
        LinkGeometry::new(
            vec3(self.link.tx_pos),
            vec3(self.link.rx_pos),
            vec3(self.link.tx_vel),
            vec3(self.link.rx_vel),
            self.link.carrier_freq_hz,
        )
        .map_err(|e| anyhow!("link geometry: {e}"))
    }

    /// Checks everything that does not depend on the scenario catalog.
    /// Returns the validated partition factor.
    pub fn validate(&self) -> Result<KeoFactor> {
        let k = KeoFactor::new(self.k_eo).map_err(|e| anyhow!("{e}"))?;
        let link = self.link_geometry()?;
        if self.num_drops == 0 {
            bail!("num_drops must be at least 1");
        }
        if !(self.bin_width_s > 0.0 && self.bin_width_s.is_finite()) {
            bail!("bin_width_s must be positive");
        }
        if !self.time_s.is_finite() {
            bail!("time_s must be finite");
        }
        if self.environment_objects.is_empty() && self.k_eo > 0.0 {
            bail!("k_eo is positive but no environment objects are configured");
        }
        for (i, eo) in self.environment_objects.iter().enumerate() {
            self.material(eo.material_name())
                .with_context(|| format!("environment object {i}"))?;
            eo_path_geometry(&link, &eo.plane())
                .map_err(|e| anyhow!("environment object {i}: {e}"))?;
        }
        for m in self.materials.values() {
            if !(m.eps_real >= 1.0 && m.eps_real.is_finite()) {
                bail!("material eps_real must be >= 1");
            }
            if !(m.conductivity >= 0.0 && m.conductivity.is_finite()) {
                bail!("material conductivity must be non-negative");
            }
        }
        self.check_antenna(&self.tx_antenna, "tx_antenna")?;
        self.check_antenna(&self.rx_antenna, "rx_antenna")?;
        Ok(k)
    }

    fn check_antenna(&self, antenna: &AntennaConfig, which: &str) -> Result<()> {
        if let AntennaConfig::Directional {
            azimuth_hpbw_deg,
            zenith_hpbw_deg,
            max_attenuation_db,
            boresight,
        } = antenna
        {
            if !(*azimuth_hpbw_deg > 0.0 && *zenith_hpbw_deg > 0.0) {
                bail!("{which}: beamwidths must be positive");
            }
            if !(*max_attenuation_db > 0.0) {
                bail!("{which}: max_attenuation_db must be positive");
            }
            if boresight.is_none() && self.environment_objects.is_empty() {
                bail!(
                    "{which}: boresight is required when no environment object \
                     is available to aim at"
                );
            }
        }
        Ok(())
    }

    /// Builds both antenna arrays. Directional antennas without an explicit
    /// boresight aim at the first environment object's reflection path as
    /// resolved from this configuration; the aim is fixed here and does not
    /// follow later parameter sweeps.
    pub fn antennas(&self) -> Result<(AntennaArray, AntennaArray)> {
        let link = self.link_geometry()?;
        let auto_aim = |toward_eo: bool| -> Result<SphericalAngles> {
            let eo = self
                .environment_objects
                .first()
                .ok_or_else(|| anyhow!("no environment object to aim at"))?;
            let geom = eo_path_geometry(&link, &eo.plane()).map_err(|e| anyhow!("{e}"))?;
            Ok(if toward_eo { geom.depart } else { geom.arrive })
        };
        let build = |cfg: &AntennaConfig, is_tx: bool| -> Result<AntennaArray> {
            let pattern = match cfg {
                AntennaConfig::Isotropic => ElementPattern::Isotropic,
                AntennaConfig::Directional {
                    azimuth_hpbw_deg,
                    zenith_hpbw_deg,
                    max_attenuation_db,
                    boresight,
                } => {
                    let bore = match boresight {
                        Some(b) => SphericalAngles::new(
                            b.zenith_deg.to_radians(),
                            b.azimuth_deg.to_radians(),
                        ),
                        None => auto_aim(is_tx)?,
                    };
                    ElementPattern::Directional {
                        azimuth_hpbw_deg: *azimuth_hpbw_deg,
                        zenith_hpbw_deg: *zenith_hpbw_deg,
                        max_attenuation_db: *max_attenuation_db,
                        boresight: bore,
                    }
                }
            };
            Ok(AntennaArray { pattern, layout: ArrayLayout::single() })
        };
        Ok((build(&self.tx_antenna, true)?, build(&self.rx_antenna, false)?))
    }
}
