//! Antenna element patterns, array phase terms and Doppler rotation.
//!
//! Elements radiate a single linear polarization: the field response is
//! reported as a `(vertical, horizontal)` pair with the horizontal component
//! identically zero. The directional pattern is the standard parabolic
//! attenuation in dB, quadratic in the angular offset from boresight in each
//! principal cut and clipped at a front-to-back floor:
//!
//! ```text
//! A(theta, phi) = -min(min(12 (dphi / hpbw_az)^2, A_max)
//!                    + min(12 (dtheta / hpbw_zen)^2, A_max), A_max)   [dB]
//! ```
//!
//! which puts the -3 dB points half a beamwidth from boresight in each cut.
//! Field amplitudes are `10^(A/20)`.
//!
//! Array and Doppler phase terms use the plane-wave approximation: a phasor
//! `exp(j 2 pi r_hat . d / lambda)` for an element displaced by `d`, and
//! `exp(j 2 pi (r_hat . v) t / lambda)` for a terminal moving at `v`, where
//! `r_hat` points along the propagating ray away from the terminal.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::pow;
use num_complex::Complex64;

use crate::geometry::{wrap_azimuth, SphericalAngles, Vec3};

/// Field pattern of a single antenna element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ElementPattern {
    /// Unit response in every direction.
    Isotropic,
    /// Parabolic-in-dB main lobe with a front-to-back attenuation floor.
    Directional {
        /// Half-power beamwidth of the azimuth cut, degrees.
        azimuth_hpbw_deg: f64,
        /// Half-power beamwidth of the zenith cut, degrees.
        zenith_hpbw_deg: f64,
        /// Attenuation floor applied per cut and in total, dB (positive).
        max_attenuation_db: f64,
        /// Pointing direction of the main lobe.
        boresight: SphericalAngles,
    },
}

impl ElementPattern {
    /// Directional pattern with the attenuation floor at 30 dB.
    pub fn directional(azimuth_hpbw_deg: f64, zenith_hpbw_deg: f64, boresight: SphericalAngles) -> Self {
        ElementPattern::Directional {
            azimuth_hpbw_deg,
            zenith_hpbw_deg,
            max_attenuation_db: 30.0,
            boresight,
        }
    }

    /// Pattern gain in dB toward `direction` (0 dB at boresight).
    pub fn gain_db(&self, direction: SphericalAngles) -> f64 {
        match *self {
            ElementPattern::Isotropic => 0.0,
            ElementPattern::Directional {
                azimuth_hpbw_deg,
                zenith_hpbw_deg,
                max_attenuation_db,
                boresight,
            } => {
                let dphi = wrap_azimuth(direction.azimuth - boresight.azimuth).to_degrees();
                let dtheta = (direction.zenith - boresight.zenith).to_degrees();
                let az = (12.0 * (dphi / azimuth_hpbw_deg) * (dphi / azimuth_hpbw_deg))
                    .min(max_attenuation_db);
                let zen = (12.0 * (dtheta / zenith_hpbw_deg) * (dtheta / zenith_hpbw_deg))
                    .min(max_attenuation_db);
                -(az + zen).min(max_attenuation_db)
            }
        }
    }

    /// Field response toward `direction` as `(vertical, horizontal)`
    /// amplitudes. The horizontal component is always zero.
    pub fn field(&self, direction: SphericalAngles) -> (f64, f64) {
        (pow(10.0, self.gain_db(direction) / 20.0), 0.0)
    }
}

/// Element positions relative to the array phase center, m.
#[derive(Clone, Debug, PartialEq)]
pub struct ArrayLayout {
    offsets: Vec<Vec3>,
}

impl ArrayLayout {
    /// Single element at the phase center.
    pub fn single() -> Self {
        ArrayLayout { offsets: vec![Vec3::ZERO] }
    }

    /// Layout from explicit element offsets. Must be non-empty.
    pub fn new(offsets: Vec<Vec3>) -> Option<Self> {
        if offsets.is_empty() {
            None
        } else {
            Some(ArrayLayout { offsets })
        }
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn offsets(&self) -> &[Vec3] {
        &self.offsets
    }
}

/// An antenna: one element pattern shared by all elements of a layout.
#[derive(Clone, Debug, PartialEq)]
pub struct AntennaArray {
    pub pattern: ElementPattern,
    pub layout: ArrayLayout,
}

impl AntennaArray {
    /// Single isotropic element.
    pub fn isotropic() -> Self {
        AntennaArray { pattern: ElementPattern::Isotropic, layout: ArrayLayout::single() }
    }

    /// Single element with the given pattern.
    pub fn single(pattern: ElementPattern) -> Self {
        AntennaArray { pattern, layout: ArrayLayout::single() }
    }
}

/// Plane-wave phase of an element displaced by `offset` for a ray leaving
/// the array along `r_hat`.
pub fn array_phase(r_hat: Vec3, offset: Vec3, wavelength: f64) -> Complex64 {
    Complex64::cis(2.0 * PI * r_hat.dot(offset) / wavelength)
}

/// Doppler phasor at time `t` for a terminal moving at `vel` with the ray
/// leaving (or reaching) it along `r_hat`.
pub fn doppler_phase(r_hat: Vec3, vel: Vec3, wavelength: f64, t: f64) -> Complex64 {
    Complex64::cis(2.0 * PI * r_hat.dot(vel) * t / wavelength)
}
