//! Channel impulse response synthesis.
//!
//! A channel realization is a set of taps, each carrying a delay and a
//! matrix of complex gains over receive/transmit element pairs. Two tap
//! populations are combined:
//!
//! * **Reflector taps**: deterministic single-bounce contributions from
//!   environment objects, built from the image-method geometry, the Fresnel
//!   coefficient of the surface material, the element patterns, plane-wave
//!   array phases and a Doppler rotation. These carry their full geometric
//!   propagation delay.
//! * **Stochastic taps**: one tap per cluster, summing its rays with their
//!   random phases. Cluster delays are excess delays referenced to the
//!   earliest cluster at zero, the usual convention for the stochastic part
//!   of a geometry-based model.
//!
//! The two populations are mixed by a power-partition factor `k`: each side
//! is normalized to unit ensemble power and scaled by `sqrt(k)` and
//! `sqrt(1 - k)` respectively, so the reflector fraction of the combined
//! response equals `k` exactly in every realization and the total power is
//! exactly one. Antennas radiate a single (vertical) polarization, so the
//! reflector bounce applies the in-plane Fresnel coefficient to the zenith
//! field component and the orthogonal component vanishes.

use alloc::vec::Vec;
use core::fmt;

use libm::sqrt;
use num_complex::Complex64;

use crate::antenna::{array_phase, doppler_phase, AntennaArray};
use crate::clusters::ClusterSet;
use crate::geometry::{EoPathGeometry, GeometryError, LinkGeometry, SphericalAngles};
use crate::materials::{fresnel, Material, MaterialError};

/// Errors from response synthesis.
#[derive(Clone, Debug, PartialEq)]
pub enum CirError {
    /// Power-partition factor outside `[0, 1]`.
    InvalidKeo(f64),
    /// Inputs admit no meaningful response (empty or zero-power side,
    /// coincident terminals, and similar).
    DegenerateInput(&'static str),
    Geometry(GeometryError),
    Material(MaterialError),
}

impl fmt::Display for CirError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CirError::InvalidKeo(k) => {
                write!(f, "power-partition factor {k} outside [0, 1]")
            }
            CirError::DegenerateInput(msg) => write!(f, "degenerate input: {msg}"),
            CirError::Geometry(e) => write!(f, "{e}"),
            CirError::Material(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for CirError {}

impl From<GeometryError> for CirError {
    fn from(e: GeometryError) -> Self {
        CirError::Geometry(e)
    }
}

impl From<MaterialError> for CirError {
    fn from(e: MaterialError) -> Self {
        CirError::Material(e)
    }
}

/// Fraction of channel power carried by environment-object reflections.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KeoFactor(f64);

impl KeoFactor {
    pub fn new(k: f64) -> Result<Self, CirError> {
        if (0.0..=1.0).contains(&k) {
            Ok(KeoFactor(k))
        } else {
            Err(CirError::InvalidKeo(k))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Complex gains of one tap over receive x transmit element pairs,
/// row-major by receive element.
#[derive(Clone, Debug, PartialEq)]
pub struct TapMatrix {
    rx_count: usize,
    tx_count: usize,
    entries: Vec<Complex64>,
}

impl TapMatrix {
    fn from_entries(rx_count: usize, tx_count: usize, entries: Vec<Complex64>) -> Self {
        debug_assert_eq!(entries.len(), rx_count * tx_count);
        TapMatrix { rx_count, tx_count, entries }
    }

    pub fn rx_count(&self) -> usize {
        self.rx_count
    }

    pub fn tx_count(&self) -> usize {
        self.tx_count
    }

    pub fn get(&self, rx: usize, tx: usize) -> Complex64 {
        self.entries[rx * self.tx_count + tx]
    }

    /// Gain power averaged over element pairs.
    pub fn mean_power(&self) -> f64 {
        self.entries.iter().map(|h| h.norm_sqr()).sum::<f64>() / self.entries.len() as f64
    }

    /// Multiplies every entry by a real factor.
    pub fn scale(&mut self, factor: f64) {
        for h in &mut self.entries {
            *h *= factor;
        }
    }
}

/// Which population a tap belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TapKind {
    /// Deterministic environment-object reflection.
    EnvironmentObject,
    /// Stochastic cluster.
    Stochastic,
}

/// One delay tap of the impulse response.
#[derive(Clone, Debug, PartialEq)]
pub struct Tap {
    /// Tap delay, s.
    pub delay: f64,
    pub kind: TapKind,
    pub coeff: TapMatrix,
}

impl Tap {
    /// Mean gain power of this tap over element pairs.
    pub fn power(&self) -> f64 {
        self.coeff.mean_power()
    }
}

/// A combined impulse response at one observation time.
#[derive(Clone, Debug, PartialEq)]
pub struct Cir {
    /// Taps sorted by delay.
    pub taps: Vec<Tap>,
    /// Observation time the Doppler rotation was evaluated at, s.
    pub time: f64,
}

impl Cir {
    /// Sum of tap powers.
    pub fn total_power(&self) -> f64 {
        self.taps.iter().map(Tap::power).sum()
    }

    /// Fraction of the total power carried by taps of `kind`.
    pub fn power_fraction(&self, kind: TapKind) -> f64 {
        let total = self.total_power();
        if total == 0.0 {
            return 0.0;
        }
        self.taps.iter().filter(|t| t.kind == kind).map(Tap::power).sum::<f64>() / total
    }

    /// `(delay, power)` pairs for delay-domain statistics.
    pub fn delay_power_pairs(&self) -> Vec<(f64, f64)> {
        self.taps.iter().map(|t| (t.delay, t.power())).collect()
    }
}

/// Synthesizes the deterministic tap for one environment-object reflection.
///
/// The per-element-pair gain is the zenith-polarized pattern product with
/// the in-plane Fresnel coefficient of `material` at the geometric incidence
/// angle, the carrier phase of the full path length, plane-wave array phases
/// at both ends and the Doppler rotation accumulated by `time`.
pub fn eo_coefficient(
    link: &LinkGeometry,
    geom: &EoPathGeometry,
    material: &Material,
    tx: &AntennaArray,
    rx: &AntennaArray,
    time: f64,
) -> Result<Tap, CirError> {
    let lambda = link.wavelength();
    let (r_par, _r_perp) = fresnel(geom.incidence_angle, material, link.carrier_freq)?;

    let (ftx, _) = tx.pattern.field(geom.depart);
    let (frx, _) = rx.pattern.field(geom.arrive);
    let carrier = Complex64::cis(-2.0 * core::f64::consts::PI * geom.path_length / lambda);
    let doppler = doppler_phase(geom.tx_to_eo, link.tx_vel, lambda, time)
        * doppler_phase(geom.rx_to_eo, link.rx_vel, lambda, time);
    let base = r_par * carrier * doppler * (frx * ftx);

    let mut entries = Vec::with_capacity(rx.layout.len() * tx.layout.len());
    for du in rx.layout.offsets() {
        let rx_phase = array_phase(geom.rx_to_eo, *du, lambda);
        for ds in tx.layout.offsets() {
            let tx_phase = array_phase(geom.tx_to_eo, *ds, lambda);
            entries.push(base * rx_phase * tx_phase);
        }
    }
    Ok(Tap {
        delay: geom.delay,
        kind: TapKind::EnvironmentObject,
        coeff: TapMatrix::from_entries(rx.layout.len(), tx.layout.len(), entries),
    })
}

/// Synthesizes one stochastic tap per cluster.
///
/// Relative ray angles are anchored on the straight-line link direction:
/// departures about the Tx->Rx direction, arrivals about Rx->Tx. Each tap
/// gain sums the cluster rays with their phases, pattern weights, array
/// phases and Doppler rotations, scaled to `sqrt(power / ray count)`.
pub fn cluster_taps(
    set: &ClusterSet,
    link: &LinkGeometry,
    tx: &AntennaArray,
    rx: &AntennaArray,
    time: f64,
) -> Result<Vec<Tap>, CirError> {
    let lambda = link.wavelength();
    let los = link.rx_pos - link.tx_pos;
    let dep_anchor = los
        .try_normalized()
        .map(SphericalAngles::from_vector)
        .ok_or(CirError::DegenerateInput("coincident terminals"))?;
    let arr_anchor = SphericalAngles::from_vector(-los);

    let u = rx.layout.len();
    let s = tx.layout.len();
    let mut taps = Vec::with_capacity(set.clusters.len());
    for cluster in &set.clusters {
        if cluster.rays.is_empty() {
            return Err(CirError::DegenerateInput("cluster without rays"));
        }
        let scale = sqrt(cluster.power / cluster.rays.len() as f64);
        let mut entries = alloc::vec![Complex64::new(0.0, 0.0); u * s];
        for ray in &cluster.rays {
            let depart = SphericalAngles::new(
                dep_anchor.zenith + ray.departure.zenith,
                dep_anchor.azimuth + ray.departure.azimuth,
            );
            let arrive = SphericalAngles::new(
                arr_anchor.zenith + ray.arrival.zenith,
                arr_anchor.azimuth + ray.arrival.azimuth,
            );
            let k_tx = depart.unit_vector();
            let k_rx = arrive.unit_vector();
            let (ftx, _) = tx.pattern.field(depart);
            let (frx, _) = rx.pattern.field(arrive);
            let base = Complex64::cis(ray.initial_phase)
                * doppler_phase(k_tx, link.tx_vel, lambda, time)
                * doppler_phase(k_rx, link.rx_vel, lambda, time)
                * (frx * ftx);
            for (iu, du) in rx.layout.offsets().iter().enumerate() {
                let rx_phase = array_phase(k_rx, *du, lambda);
                for (is, dso) in tx.layout.offsets().iter().enumerate() {
                    entries[iu * s + is] += base * rx_phase * array_phase(k_tx, *dso, lambda);
                }
            }
        }
        let mut coeff = TapMatrix::from_entries(u, s, entries);
        coeff.scale(scale);
        taps.push(Tap { delay: cluster.delay, kind: TapKind::Stochastic, coeff });
    }
    Ok(taps)
}

/// Combines reflector and stochastic taps under the power partition `k`.
///
/// Each side is renormalized to unit total power, then scaled by `sqrt(k)`
/// and `sqrt(1 - k)`. At the endpoints `k = 0` and `k = 1` the vanished
/// side is dropped entirely. The surviving side must carry nonzero power.
pub fn combine_nlos(
    eo_taps: Vec<Tap>,
    stochastic_taps: Vec<Tap>,
    k: KeoFactor,
    time: f64,
) -> Result<Cir, CirError> {
    let k = k.value();
    let eo_power: f64 = eo_taps.iter().map(Tap::power).sum();
    let st_power: f64 = stochastic_taps.iter().map(Tap::power).sum();

    let mut taps = Vec::new();
    if k > 0.0 {
        if !(eo_power > 0.0) {
            return Err(CirError::DegenerateInput(
                "reflector taps carry no power but k is positive",
            ));
        }
        let factor = sqrt(k / eo_power);
        for mut t in eo_taps {
            t.coeff.scale(factor);
            taps.push(t);
        }
    }
    if k < 1.0 {
        if !(st_power > 0.0) {
            return Err(CirError::DegenerateInput(
                "stochastic taps carry no power but k is below one",
            ));
        }
        let factor = sqrt((1.0 - k) / st_power);
        for mut t in stochastic_taps {
            t.coeff.scale(factor);
            taps.push(t);
        }
    }
    taps.sort_by(|a, b| a.delay.partial_cmp(&b.delay).expect("tap delays are finite"));
    Ok(Cir { taps, time })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clusters::{draw_lsps, generate_clusters, ScenarioParams};
    use crate::geometry::{eo_path_geometry, EoPlane, Vec3, SPEED_OF_LIGHT};
    use crate::rng::drop_rng;
    use approx::assert_relative_eq;
    use core::f64::consts::PI;

    fn table_link() -> LinkGeometry {
        LinkGeometry::static_link(
            Vec3::new(0.0, 0.0, 1.6),
            Vec3::new(0.0, 26.0, 1.6),
            26.0e9,
        )
        .unwrap()
    }

    fn table_geom(link: &LinkGeometry) -> EoPathGeometry {
        eo_path_geometry(link, &EoPlane::Offsets { d_tx: 6.5, d_rx: 6.5 }).unwrap()
    }

    fn test_params() -> ScenarioParams {
        ScenarioParams {
            ds_log_mean: -7.2,
            ds_log_std: 0.5,
            asa_log_mean: 1.7,
            asa_log_std: 0.37,
            asd_log_mean: 1.2,
            asd_log_std: 0.49,
            zsa_log_mean: 0.86,
            zsa_log_std: 0.31,
            zod_offset_deg: 0.0,
            num_clusters: 19,
            rays_per_cluster: 20,
            delay_scaling: 2.1,
            shadowing_std_db: 3.0,
            cluster_asd_deg: 10.0,
            cluster_asa_deg: 22.0,
            cluster_zsa_deg: 7.0,
        }
    }

    fn sample_clusters(seed: u64, drop: u64) -> ClusterSet {
        let params = test_params();
        let mut rng = drop_rng(seed, drop);
        let lsps = draw_lsps(&params, &mut rng).unwrap();
        generate_clusters(&lsps, &params, &mut rng).unwrap()
    }

    #[test]
    fn mirror_tap_carries_geometric_delay_and_carrier_phase() {
        let link = table_link();
        let geom = table_geom(&link);
        let tap = eo_coefficient(
            &link,
            &geom,
            &Material::PerfectConductor,
            &AntennaArray::isotropic(),
            &AntennaArray::isotropic(),
            0.0,
        )
        .unwrap();
        assert_eq!(tap.delay, geom.delay);
        assert_eq!(tap.kind, TapKind::EnvironmentObject);
        // Perfect conductor, isotropic elements: unit magnitude, pure
        // carrier phase of the path length.
        let h = tap.coeff.get(0, 0);
        assert_relative_eq!(h.norm(), 1.0, epsilon = 1e-12);
        let expected = Complex64::cis(-2.0 * PI * geom.path_length / link.wavelength());
        assert_relative_eq!((h - expected).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn lossy_material_attenuates_mirror_tap() {
        let link = table_link();
        let geom = table_geom(&link);
        let iso = AntennaArray::isotropic();
        let pec = eo_coefficient(&link, &geom, &Material::PerfectConductor, &iso, &iso, 0.0)
            .unwrap();
        let concrete = eo_coefficient(
            &link,
            &geom,
            &Material::preset("concrete").unwrap(),
            &iso,
            &iso,
            0.0,
        )
        .unwrap();
        assert!(concrete.power() < pec.power());
        assert!(concrete.power() > 0.0);
    }

    #[test]
    fn moving_receiver_rotates_mirror_phase() {
        let mut link = table_link();
        link.rx_vel = Vec3::new(1.0, 2.0, 0.0);
        let geom = table_geom(&link);
        let iso = AntennaArray::isotropic();
        let m = Material::PerfectConductor;
        let h0 = eo_coefficient(&link, &geom, &m, &iso, &iso, 0.0).unwrap().coeff.get(0, 0);
        let dt = 1e-5;
        let h1 = eo_coefficient(&link, &geom, &m, &iso, &iso, dt).unwrap().coeff.get(0, 0);
        let rate = (h1 * h0.conj()).arg() / dt;
        let expected = 2.0 * PI * geom.rx_to_eo.dot(link.rx_vel) / link.wavelength();
        assert_relative_eq!(rate, expected, max_relative = 1e-6);
    }

    #[test]
    fn stochastic_taps_mirror_cluster_structure() {
        let link = table_link();
        let set = sample_clusters(4, 0);
        let iso = AntennaArray::isotropic();
        let taps = cluster_taps(&set, &link, &iso, &iso, 0.0).unwrap();
        assert_eq!(taps.len(), set.clusters.len());
        for (tap, cluster) in taps.iter().zip(&set.clusters) {
            assert_eq!(tap.delay, cluster.delay);
            assert_eq!(tap.kind, TapKind::Stochastic);
            assert!(tap.power() > 0.0);
        }
    }

    #[test]
    fn stochastic_power_is_unbiased_for_isotropic_elements() {
        // Random ray phases make each drop fluctuate, but the ensemble mean
        // of the summed tap power equals the summed cluster power (one).
        let link = table_link();
        let iso = AntennaArray::isotropic();
        let drops = 600;
        let mut acc = 0.0;
        for k in 0..drops {
            let set = sample_clusters(33, k);
            let taps = cluster_taps(&set, &link, &iso, &iso, 0.0).unwrap();
            acc += taps.iter().map(Tap::power).sum::<f64>();
        }
        let mean = acc / drops as f64;
        assert!((mean - 1.0).abs() < 0.05, "ensemble mean {mean}");
    }

    #[test]
    fn partition_factor_splits_power_exactly() {
        let link = table_link();
        let geom = table_geom(&link);
        let iso = AntennaArray::isotropic();
        let m = Material::preset("concrete").unwrap();
        for k in [0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0] {
            let eo = eo_coefficient(&link, &geom, &m, &iso, &iso, 0.0).unwrap();
            let st = cluster_taps(&sample_clusters(8, 2), &link, &iso, &iso, 0.0).unwrap();
            let cir =
                combine_nlos(alloc::vec![eo], st, KeoFactor::new(k).unwrap(), 0.0).unwrap();
            assert_relative_eq!(cir.total_power(), 1.0, epsilon = 1e-12);
            assert_relative_eq!(
                cir.power_fraction(TapKind::EnvironmentObject),
                k,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn endpoint_partitions_drop_the_vanished_side() {
        let link = table_link();
        let geom = table_geom(&link);
        let iso = AntennaArray::isotropic();
        let m = Material::PerfectConductor;
        let eo = eo_coefficient(&link, &geom, &m, &iso, &iso, 0.0).unwrap();
        let st = cluster_taps(&sample_clusters(8, 2), &link, &iso, &iso, 0.0).unwrap();

        let pure_st =
            combine_nlos(alloc::vec![eo.clone()], st.clone(), KeoFactor::new(0.0).unwrap(), 0.0)
                .unwrap();
        assert!(pure_st.taps.iter().all(|t| t.kind == TapKind::Stochastic));

        let pure_eo = combine_nlos(alloc::vec![eo], st, KeoFactor::new(1.0).unwrap(), 0.0).unwrap();
        assert!(pure_eo.taps.iter().all(|t| t.kind == TapKind::EnvironmentObject));
        assert_relative_eq!(pure_eo.total_power(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_sides_are_rejected() {
        let link = table_link();
        let iso = AntennaArray::isotropic();
        let st = cluster_taps(&sample_clusters(8, 2), &link, &iso, &iso, 0.0).unwrap();
        // Positive k with no reflector taps cannot be normalized.
        assert!(matches!(
            combine_nlos(Vec::new(), st.clone(), KeoFactor::new(0.5).unwrap(), 0.0),
            Err(CirError::DegenerateInput(_))
        ));
        // k below one with no stochastic taps likewise.
        let geom = table_geom(&link);
        let eo = eo_coefficient(&link, &geom, &Material::PerfectConductor, &iso, &iso, 0.0)
            .unwrap();
        assert!(matches!(
            combine_nlos(alloc::vec![eo], Vec::new(), KeoFactor::new(0.5).unwrap(), 0.0),
            Err(CirError::DegenerateInput(_))
        ));
        assert!(matches!(KeoFactor::new(1.5), Err(CirError::InvalidKeo(_))));
        assert!(matches!(KeoFactor::new(-0.1), Err(CirError::InvalidKeo(_))));
        assert!(KeoFactor::new(0.0).is_ok());
        assert!(KeoFactor::new(1.0).is_ok());
    }

    #[test]
    fn combined_taps_are_sorted_by_delay() {
        let link = table_link();
        let geom = table_geom(&link);
        let iso = AntennaArray::isotropic();
        let eo = eo_coefficient(&link, &geom, &Material::PerfectConductor, &iso, &iso, 0.0)
            .unwrap();
        let st = cluster_taps(&sample_clusters(8, 2), &link, &iso, &iso, 0.0).unwrap();
        let cir = combine_nlos(alloc::vec![eo], st, KeoFactor::new(0.5).unwrap(), 0.0).unwrap();
        for w in cir.taps.windows(2) {
            assert!(w[0].delay <= w[1].delay);
        }
    }

    #[test]
    fn array_elements_see_plane_wave_phase_gradient() {
        let link = table_link();
        let geom = table_geom(&link);
        let lambda = link.wavelength();
        let offset = Vec3::new(0.0, lambda / 4.0, 0.0);
        let rx = AntennaArray {
            pattern: crate::antenna::ElementPattern::Isotropic,
            layout: crate::antenna::ArrayLayout::new(alloc::vec![Vec3::ZERO, offset]).unwrap(),
        };
        let tap = eo_coefficient(
            &link,
            &geom,
            &Material::PerfectConductor,
            &AntennaArray::isotropic(),
            &rx,
            0.0,
        )
        .unwrap();
        let ratio = tap.coeff.get(1, 0) * tap.coeff.get(0, 0).conj();
        let expected = 2.0 * PI * geom.rx_to_eo.dot(offset) / lambda;
        assert_relative_eq!(ratio.arg(), crate::geometry::wrap_azimuth(expected), epsilon = 1e-12);
    }

    #[test]
    fn directional_pattern_reweights_stochastic_taps() {
        let link = table_link();
        let set = sample_clusters(12, 0);
        let iso = AntennaArray::isotropic();
        let geom = table_geom(&link);
        let horn = AntennaArray::single(crate::antenna::ElementPattern::directional(
            8.0,
            8.0,
            geom.arrive,
        ));
        let open = cluster_taps(&set, &link, &iso, &iso, 0.0).unwrap();
        let shaded = cluster_taps(&set, &link, &iso, &horn, 0.0).unwrap();
        let p_open: f64 = open.iter().map(Tap::power).sum();
        let p_shaded: f64 = shaded.iter().map(Tap::power).sum();
        assert!(p_shaded < p_open);
    }

    #[test]
    fn mirror_delay_equals_reported_formula() {
        let link = table_link();
        let geom = table_geom(&link);
        assert_relative_eq!(
            geom.delay,
            libm::sqrt(845.0) / SPEED_OF_LIGHT,
            max_relative = 1e-12
        );
    }
}
