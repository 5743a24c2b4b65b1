//! Core channel model for NLOS links with strong specular reflectors.
//!
//! The library builds narrowband channel impulse responses for a
//! target-to-receiver link in which part of the NLOS power travels over a
//! deterministic single-bounce reflection off a large vertical surface (a
//! building wall, a metal fence) and the rest over stochastically drawn
//! multipath clusters. The power split between the two contributions is
//! controlled by a single factor in `[0, 1]`.
//!
//! Modules:
//! - [`geometry`]: image-method reflection geometry on vertical planes.
//! - [`antenna`]: element field patterns, array and Doppler phase factors.
//! - [`materials`]: Fresnel reflection coefficients for reflector surfaces.
//! - [`clusters`]: reduced geometry-based stochastic cluster generation.
//! - [`cir`]: impulse-response assembly and the reflected/stochastic power split.
//! - [`metrics`]: power delay profiles, RMS delay spread, empirical CDFs and
//!   measured scatterer power bookkeeping.
//! - [`rng`]: reproducible per-drop random substreams.
//!
//! The crate is `no_std` (with `alloc`) and uses `libm` for all float math,
//! so results are bit-identical between hosted and embedded builds. All
//! operations are pure functions of their inputs; nothing here spawns
//! threads or performs IO.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod antenna;
pub mod cir;
pub mod clusters;
pub mod geometry;
pub mod materials;
pub mod metrics;
pub mod rng;

pub use geometry::{LinkGeometry, SphericalAngles, Vec3, SPEED_OF_LIGHT};
