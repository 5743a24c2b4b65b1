//! Single-bounce reflection geometry on vertical planar reflectors.
//!
//! A large flat scatterer is modeled as an unbounded vertical plane. The
//! reflected path from transmitter to receiver is constructed with the image
//! method: mirror the transmitter across the plane, connect the image to the
//! receiver with a straight line, and read the specular point off the
//! intersection of that line with the plane. The resulting path length also
//! has a closed form in terms of the perpendicular distances `d_tx`, `d_rx`
//! from the terminals to the plane, the horizontal terminal separation and
//! the antenna heights:
//!
//! ```text
//! d = sqrt((h_tx - h_rx)^2 + (d_tx + d_rx)^2 + d_2D^2 - (d_tx - d_rx)^2)
//! ```
//!
//! Both routes are implemented; the closed form is cross-checked against the
//! explicit image construction in the test suite.

use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use libm::{acos, atan2, cos, fabs, sin, sqrt};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Errors from reflection-geometry construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeometryError {
    /// No valid single-bounce geometry exists for the given inputs.
    InfeasibleGeometry(&'static str),
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryError::InfeasibleGeometry(msg) => {
                write!(f, "infeasible geometry: {msg}")
            }
        }
    }
}

impl core::error::Error for GeometryError {}

/// Cartesian 3-vector. Meters for positions, m/s for velocities.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, rhs: Vec3) -> f64 {
        self.x * rhs.x + self.y * rhs.y + self.z * rhs.z
    }

    pub fn norm(self) -> f64 {
        sqrt(self.dot(self))
    }

    /// Unit vector in the direction of `self`, or `None` for the zero vector.
    pub fn try_normalized(self) -> Option<Vec3> {
        let n = self.norm();
        if n > 0.0 {
            Some(self * (1.0 / n))
        } else {
            None
        }
    }

    /// Projection onto the horizontal plane (z set to 0).
    pub fn horizontal(self) -> Vec3 {
        Vec3 { z: 0.0, ..self }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, rhs: f64) -> Vec3 {
        Vec3::new(self.x * rhs, self.y * rhs, self.z * rhs)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, rhs: Vec3) -> Vec3 {
        rhs * self
    }
}

/// Wraps an azimuth angle into `(-pi, pi]`.
pub fn wrap_azimuth(phi: f64) -> f64 {
    use core::f64::consts::PI;
    let two_pi = 2.0 * PI;
    let mut w = phi % two_pi;
    if w <= -PI {
        w += two_pi;
    } else if w > PI {
        w -= two_pi;
    }
    w
}

/// Folds a zenith angle into `[0, pi]` by reflection at the poles.
pub fn fold_zenith(theta: f64) -> f64 {
    use core::f64::consts::PI;
    let two_pi = 2.0 * PI;
    let mut t = theta % two_pi;
    if t < 0.0 {
        t = -t;
    }
    if t > PI {
        t = two_pi - t;
    }
    t
}

/// A propagation direction in spherical coordinates: zenith measured from
/// +z in `[0, pi]`, azimuth measured from +x toward +y in `(-pi, pi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphericalAngles {
    pub zenith: f64,
    pub azimuth: f64,
}

impl SphericalAngles {
    /// Builds angles from arbitrary inputs, folding/wrapping into range.
    pub fn new(zenith: f64, azimuth: f64) -> Self {
        SphericalAngles { zenith: fold_zenith(zenith), azimuth: wrap_azimuth(azimuth) }
    }

    /// Angles of a (not necessarily unit) direction vector.
    ///
    /// The zero vector maps to zenith 0, azimuth 0.
    pub fn from_vector(v: Vec3) -> Self {
        let n = v.norm();
        if n == 0.0 {
            return SphericalAngles { zenith: 0.0, azimuth: 0.0 };
        }
        let zenith = acos((v.z / n).clamp(-1.0, 1.0));
        let azimuth = if v.x == 0.0 && v.y == 0.0 { 0.0 } else { atan2(v.y, v.x) };
        SphericalAngles { zenith, azimuth: wrap_azimuth(azimuth) }
    }

    /// Unit direction vector for these angles.
    pub fn unit_vector(self) -> Vec3 {
        let st = sin(self.zenith);
        Vec3::new(st * cos(self.azimuth), st * sin(self.azimuth), cos(self.zenith))
    }
}

/// Transmitter/receiver placement, velocities and carrier frequency.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkGeometry {
    pub tx_pos: Vec3,
    pub rx_pos: Vec3,
    pub tx_vel: Vec3,
    pub rx_vel: Vec3,
    /// Carrier frequency, Hz. Must be positive.
    pub carrier_freq: f64,
}

impl LinkGeometry {
    pub fn new(
        tx_pos: Vec3,
        rx_pos: Vec3,
        tx_vel: Vec3,
        rx_vel: Vec3,
        carrier_freq: f64,
    ) -> Result<Self, GeometryError> {
        if !(tx_pos.is_finite() && rx_pos.is_finite() && tx_vel.is_finite() && rx_vel.is_finite())
        {
            return Err(GeometryError::InfeasibleGeometry("non-finite link coordinates"));
        }
        if !(carrier_freq > 0.0 && carrier_freq.is_finite()) {
            return Err(GeometryError::InfeasibleGeometry("carrier frequency must be positive"));
        }
        Ok(LinkGeometry { tx_pos, rx_pos, tx_vel, rx_vel, carrier_freq })
    }

    /// A static link (zero velocities).
    pub fn static_link(tx_pos: Vec3, rx_pos: Vec3, carrier_freq: f64) -> Result<Self, GeometryError> {
        Self::new(tx_pos, rx_pos, Vec3::ZERO, Vec3::ZERO, carrier_freq)
    }

    /// Carrier wavelength, m.
    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_freq
    }

    /// Horizontal transmitter-receiver separation, m.
    pub fn d_2d(&self) -> f64 {
        (self.rx_pos.horizontal() - self.tx_pos.horizontal()).norm()
    }
}

/// An infinite vertical plane in explicit point/normal form.
///
/// Invariants: the normal is unit length with zero vertical component.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerticalPlane {
    point: Vec3,
    normal: Vec3,
}

impl VerticalPlane {
    /// Tolerance on the vertical component of a candidate normal.
    const TILT_TOL: f64 = 1e-9;

    pub fn new(point: Vec3, normal: Vec3) -> Result<Self, GeometryError> {
        if !point.is_finite() || !normal.is_finite() {
            return Err(GeometryError::InfeasibleGeometry("non-finite plane parameters"));
        }
        let unit = normal
            .try_normalized()
            .ok_or(GeometryError::InfeasibleGeometry("plane normal must be non-zero"))?;
        if fabs(unit.z) > Self::TILT_TOL {
            return Err(GeometryError::InfeasibleGeometry("plane normal must be horizontal"));
        }
        Ok(VerticalPlane { point, normal: Vec3::new(unit.x, unit.y, 0.0) })
    }

    pub fn point(&self) -> Vec3 {
        self.point
    }

    /// Unit normal, horizontal.
    pub fn normal(&self) -> Vec3 {
        self.normal
    }

    /// Signed distance from `p` to the plane, positive on the normal side.
    pub fn signed_distance(&self, p: Vec3) -> f64 {
        self.normal.dot(p - self.point)
    }
}

/// Reflector description as supplied by callers.
///
/// The offsets form mirrors how such reflectors are usually surveyed: the
/// perpendicular horizontal distances from the transmitter and the receiver
/// to the surface, with both terminals on the reflecting side. The explicit
/// form gives the plane directly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EoPlane {
    /// Perpendicular horizontal distances from Tx and Rx to the plane, m.
    Offsets { d_tx: f64, d_rx: f64 },
    /// Explicit plane through `point` with horizontal unit `normal`.
    Explicit { point: Vec3, normal: Vec3 },
}

impl EoPlane {
    /// Canonicalizes to an explicit vertical plane, resolving the offsets
    /// form against the link via [`resolve_plane`].
    pub fn resolve(&self, link: &LinkGeometry) -> Result<VerticalPlane, GeometryError> {
        match *self {
            EoPlane::Offsets { d_tx, d_rx } => resolve_plane(link, d_tx, d_rx),
            EoPlane::Explicit { point, normal } => VerticalPlane::new(point, normal),
        }
    }
}

/// Resolved single-bounce reflection geometry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EoPathGeometry {
    /// Total reflected path length Tx -> specular point -> Rx, m.
    pub path_length: f64,
    /// Propagation delay of the reflected path, s.
    pub delay: f64,
    /// Departure direction (Tx toward the reflector).
    pub depart: SphericalAngles,
    /// Arrival direction, expressed pointing from the Rx toward the reflector.
    pub arrive: SphericalAngles,
    /// Unit vector from the Tx to the specular point.
    pub tx_to_eo: Vec3,
    /// Unit vector from the Rx to the specular point.
    pub rx_to_eo: Vec3,
    /// Point on the plane where the reflection occurs.
    pub specular_point: Vec3,
    /// Incidence angle measured from the plane normal, in `[0, pi/2)`.
    pub incidence_angle: f64,
}

/// Mirror image of `p` across a vertical plane.
pub fn image_point(p: Vec3, plane: &VerticalPlane) -> Vec3 {
    p - 2.0 * plane.signed_distance(p) * plane.normal()
}

/// Constructs the vertical plane at perpendicular horizontal distances
/// `d_tx` and `d_rx` from the link terminals, with both on the same side.
///
/// Two mirror-symmetric solutions exist in general; this returns the plane
/// lying on the side reached by rotating the horizontal Tx->Rx direction by
/// +90 degrees (counterclockwise seen from above). For a degenerate link
/// with zero horizontal separation the Tx->Rx direction is taken as +y.
pub fn resolve_plane(
    link: &LinkGeometry,
    d_tx: f64,
    d_rx: f64,
) -> Result<VerticalPlane, GeometryError> {
    if !(d_tx > 0.0 && d_rx > 0.0 && d_tx.is_finite() && d_rx.is_finite()) {
        return Err(GeometryError::InfeasibleGeometry("plane offsets must be positive"));
    }
    let d_2d = link.d_2d();
    if d_2d * d_2d < (d_tx - d_rx) * (d_tx - d_rx) {
        return Err(GeometryError::InfeasibleGeometry(
            "offset difference exceeds horizontal terminal separation",
        ));
    }
    let along = if d_2d > 0.0 {
        (link.rx_pos.horizontal() - link.tx_pos.horizontal()) * (1.0 / d_2d)
    } else {
        Vec3::new(0.0, 1.0, 0.0)
    };
    // Component of the normal along the link axis, fixed by the offset
    // difference; the remainder points away from the reflector side.
    let s = if d_2d > 0.0 { (d_rx - d_tx) / d_2d } else { 0.0 };
    let left = Vec3::new(-along.y, along.x, 0.0); // +90 deg rotation of `along`
    let normal = s * along - sqrt((1.0 - s * s).max(0.0)) * left;
    let anchor = link.tx_pos.horizontal() - d_tx * normal;
    VerticalPlane::new(anchor, normal)
}

/// Resolves the full single-bounce geometry for a link and a reflector.
///
/// Fails if the terminals are not strictly on the same side of the plane
/// (no specular point exists between their projections in that case).
pub fn eo_path_geometry(
    link: &LinkGeometry,
    plane: &EoPlane,
) -> Result<EoPathGeometry, GeometryError> {
    let plane = plane.resolve(link)?;
    let s_tx = plane.signed_distance(link.tx_pos);
    let s_rx = plane.signed_distance(link.rx_pos);
    if s_tx == 0.0 || s_rx == 0.0 || (s_tx > 0.0) != (s_rx > 0.0) {
        return Err(GeometryError::InfeasibleGeometry(
            "terminals must lie strictly on the same side of the reflector",
        ));
    }
    let tx_image = image_point(link.tx_pos, &plane);
    let chord = link.rx_pos - tx_image;
    let path_length = chord.norm();
    if path_length == 0.0 {
        return Err(GeometryError::InfeasibleGeometry("degenerate reflected path"));
    }
    // The image lies at signed distance -s_tx, the receiver at +s_rx, so the
    // chord crosses the plane at fraction |s_tx| / (|s_tx| + |s_rx|).
    let a_tx = fabs(s_tx);
    let a_rx = fabs(s_rx);
    let specular_point = tx_image + (a_tx / (a_tx + a_rx)) * chord;

    let tx_to_eo = (specular_point - link.tx_pos)
        .try_normalized()
        .ok_or(GeometryError::InfeasibleGeometry("specular point coincides with Tx"))?;
    let rx_to_eo = (specular_point - link.rx_pos)
        .try_normalized()
        .ok_or(GeometryError::InfeasibleGeometry("specular point coincides with Rx"))?;

    let incidence_angle = acos(fabs(plane.normal().dot(tx_to_eo)).clamp(0.0, 1.0));

    Ok(EoPathGeometry {
        path_length,
        delay: path_length / SPEED_OF_LIGHT,
        depart: SphericalAngles::from_vector(tx_to_eo),
        arrive: SphericalAngles::from_vector(rx_to_eo),
        tx_to_eo,
        rx_to_eo,
        specular_point,
        incidence_angle,
    })
}

/// Closed-form reflected path length from perpendicular offsets, heights and
/// horizontal separation. Equals the image-method construction for every
/// feasible geometry.
pub fn path_length_closed_form(h_tx: f64, h_rx: f64, d_tx: f64, d_rx: f64, d_2d: f64) -> f64 {
    // (d_tx + d_rx)^2 - (d_tx - d_rx)^2 collapses to 4 d_tx d_rx; the
    // expanded grouping cancels catastrophically near grazing geometries.
    let dh = h_tx - h_rx;
    sqrt(dh * dh + 4.0 * d_tx * d_rx + d_2d * d_2d)
}
