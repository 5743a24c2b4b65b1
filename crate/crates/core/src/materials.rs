//! Reflection from homogeneous material half-spaces.
//!
//! A reflector surface is characterized by its complex relative permittivity
//! `eta = eps_r - j sigma / (2 pi f eps_0)`. The Fresnel coefficients for a
//! wave incident from free space at angle `theta` from the surface normal are
//!
//! ```text
//! R_par  = (eta cos(theta) - sqrt(eta - sin^2(theta)))
//!        / (eta cos(theta) + sqrt(eta - sin^2(theta)))      (E in plane)
//! R_perp = (cos(theta)     - sqrt(eta - sin^2(theta)))
//!        / (cos(theta)     + sqrt(eta - sin^2(theta)))      (E normal to plane)
//! ```
//!
//! with the principal branch of the complex square root. A perfect electric
//! conductor is the `eta -> infinity` limit, `(R_par, R_perp) = (1, -1)`.
//! Passive materials never reflect more power than they receive, so both
//! magnitudes stay at or below one.

use core::f64::consts::PI;
use core::fmt;

use libm::{cos, sin};
use num_complex::Complex64;

/// Vacuum permittivity, F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

/// Errors from reflection-coefficient evaluation.
#[derive(Clone, Debug, PartialEq)]
pub enum MaterialError {
    /// Incidence angle outside `[0, pi/2)` or otherwise unusable input.
    DomainError(&'static str),
}

impl fmt::Display for MaterialError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaterialError::DomainError(msg) => write!(f, "domain error: {msg}"),
        }
    }
}

impl core::error::Error for MaterialError {}

/// Electromagnetic description of a reflector surface.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Material {
    /// Idealized metal: total reflection with the conductor sign convention.
    PerfectConductor,
    /// Lossy dielectric half-space.
    Dielectric {
        /// Real relative permittivity. Must be >= 1.
        eps_real: f64,
        /// Conductivity, S/m. Must be >= 0.
        conductivity: f64,
    },
}

impl Material {
    /// Lossless dielectric of the given relative permittivity.
    pub fn lossless(eps_real: f64) -> Self {
        Material::Dielectric { eps_real, conductivity: 0.0 }
    }

    /// Builtin surface presets by name: `"concrete"`, `"glass"`, `"metal"`.
    ///
    /// Dielectric parameters are evaluated for the lower millimeter-wave
    /// band (around 26 GHz) from the usual frequency power laws for
    /// building materials.
    pub fn preset(name: &str) -> Option<Material> {
        match name {
            "concrete" => Some(Material::Dielectric { eps_real: 5.31, conductivity: 0.4556 }),
            "glass" => Some(Material::Dielectric { eps_real: 6.27, conductivity: 0.2093 }),
            "metal" => Some(Material::PerfectConductor),
            _ => None,
        }
    }

    /// Complex relative permittivity at frequency `freq` (Hz).
    ///
    /// The perfect conductor reports an infinite real part.
    pub fn complex_permittivity(&self, freq: f64) -> Complex64 {
        match *self {
            Material::PerfectConductor => Complex64::new(f64::INFINITY, 0.0),
            Material::Dielectric { eps_real, conductivity } => {
                Complex64::new(eps_real, -conductivity / (2.0 * PI * freq * VACUUM_PERMITTIVITY))
            }
        }
    }

    fn validate(&self) -> Result<(), MaterialError> {
        if let Material::Dielectric { eps_real, conductivity } = *self {
            if !(eps_real >= 1.0 && eps_real.is_finite()) {
                return Err(MaterialError::DomainError("relative permittivity must be >= 1"));
            }
            if !(conductivity >= 0.0 && conductivity.is_finite()) {
                return Err(MaterialError::DomainError("conductivity must be non-negative"));
            }
        }
        Ok(())
    }
}

/// Fresnel reflection coefficients `(parallel, perpendicular)` for incidence
/// at `theta_i` radians from the normal onto `material` at frequency `freq`.
///
/// `theta_i` must lie in `[0, pi/2)`; grazing incidence itself is excluded
/// because the specular construction degenerates there.
pub fn fresnel(
    theta_i: f64,
    material: &Material,
    freq: f64,
) -> Result<(Complex64, Complex64), MaterialError> {
    if !(theta_i >= 0.0 && theta_i < PI / 2.0) {
        return Err(MaterialError::DomainError("incidence angle must be in [0, pi/2)"));
    }
    if !(freq > 0.0 && freq.is_finite()) {
        return Err(MaterialError::DomainError("frequency must be positive"));
    }
    material.validate()?;

    if let Material::PerfectConductor = material {
        return Ok((Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)));
    }

    let eta = material.complex_permittivity(freq);
    let c = Complex64::new(cos(theta_i), 0.0);
    let s = sin(theta_i);
    let root = (eta - s * s).sqrt();
    let r_par = (eta * c - root) / (eta * c + root);
    let r_perp = (c - root) / (c + root);
    Ok((r_par, r_perp))
}
