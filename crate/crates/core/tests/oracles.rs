//! Numerical oracles for the geometric and statistical building blocks:
//! independent closed forms and ensemble expectations that the generation
//! pipeline must reproduce.

use eochan_core::cir::{cluster_taps, Tap};
use eochan_core::clusters::{draw_lsps, generate_clusters, LspSet, ScenarioParams};
use eochan_core::geometry::{
    eo_path_geometry, image_point, path_length_closed_form, resolve_plane, EoPlane,
    LinkGeometry, Vec3,
};
use eochan_core::metrics::rms_delay_spread;
use eochan_core::rng::drop_rng;
use eochan_core::antenna::AntennaArray;
use rand::Rng;

fn urban_params() -> ScenarioParams {
    ScenarioParams {
        ds_log_mean: -7.173527,
        ds_log_std: 0.509018,
        asa_log_mean: 1.695491,
        asa_log_std: 0.371568,
        asd_log_mean: 1.200786,
        asd_log_std: 0.487450,
        zsa_log_mean: 0.862745,
        zsa_log_std: 0.309805,
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

/// Draws a random link and feasible plane offsets.
fn random_geometry<R: Rng>(rng: &mut R) -> (LinkGeometry, f64, f64) {
    loop {
        let coord = |rng: &mut R| rng.random::<f64>() * 100.0 - 50.0;
        let height = |rng: &mut R| 0.5 + rng.random::<f64>() * 9.5;
        let tx = Vec3::new(coord(rng), coord(rng), height(rng));
        let rx = Vec3::new(coord(rng), coord(rng), height(rng));
        let freq = 1.0e9 + rng.random::<f64>() * 99.0e9;
        let link = match LinkGeometry::static_link(tx, rx, freq) {
            Ok(l) => l,
            Err(_) => continue,
        };
        let d_2d = link.d_2d();
        if d_2d < 0.5 {
            continue;
        }
        let d_tx = 0.5 + rng.random::<f64>() * 29.5;
        let frac = rng.random::<f64>() * 1.9 - 0.95;
        let d_rx = d_tx + frac * d_2d;
        if d_rx < 0.1 {
            continue;
        }
        return (link, d_tx, d_rx);
    }
}

#[test]
fn closed_form_matches_image_construction_everywhere() {
    let mut rng = drop_rng(0xC10_5ED, 0);
    for _ in 0..10_000 {
        let (link, d_tx, d_rx) = random_geometry(&mut rng);
        let plane = resolve_plane(&link, d_tx, d_rx).unwrap();
        let image = image_point(link.tx_pos, &plane);
        let constructed = (link.rx_pos - image).norm();
        let closed = path_length_closed_form(
            link.tx_pos.z,
            link.rx_pos.z,
            d_tx,
            d_rx,
            link.d_2d(),
        );
        let rel = (constructed - closed).abs() / closed;
        assert!(rel <= 1e-12, "rel {rel} for offsets {d_tx}, {d_rx}");

        let geom = eo_path_geometry(&link, &EoPlane::Offsets { d_tx, d_rx }).unwrap();
        let rel2 = (geom.path_length - closed).abs() / closed;
        assert!(rel2 <= 1e-12, "rel {rel2} through full resolution");
    }
}

#[test]
fn lognormal_parameter_statistics_match_inputs() {
    let params = urban_params();
    let n = 100_000u64;
    let mut log_ds = Vec::with_capacity(n as usize);
    let mut asa = Vec::with_capacity(n as usize);
    for k in 0..n {
        let mut rng = drop_rng(0x57A7, k);
        let lsps = draw_lsps(&params, &mut rng).unwrap();
        log_ds.push(lsps.delay_spread.log10());
        asa.push(lsps.azimuth_spread_arrival.to_degrees());
    }
    let mean = log_ds.iter().sum::<f64>() / n as f64;
    let var =
        log_ds.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n as f64 - 1.0);
    // Delay spread is uncapped: its log-mean and log-deviation must land
    // on the scenario inputs to better than one percent.
    assert!(
        (mean - params.ds_log_mean).abs() < 0.01 * params.ds_log_mean.abs(),
        "mean log ds {mean}"
    );
    assert!(
        (var.sqrt() - params.ds_log_std).abs() < 0.01 * params.ds_log_std,
        "std log ds {}",
        var.sqrt()
    );

    // The azimuth cap truncates the upper tail, so check the median (which
    // the cap leaves untouched) and the cap itself.
    asa.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = asa[asa.len() / 2];
    let expected = 10f64.powf(params.asa_log_mean);
    assert!(
        (median - expected).abs() < 0.01 * expected,
        "median asa {median} vs {expected}"
    );
    assert!(asa.iter().all(|a| *a <= 104.0 + 1e-9));
    assert!(*asa.last().unwrap() > 100.0, "cap should bite in 1e5 draws");
}

#[test]
fn realized_cluster_spread_scales_linearly_with_input_spread() {
    let params = urban_params();
    let fixed_angles = |ds: f64| LspSet {
        delay_spread: ds,
        azimuth_spread_arrival: 0.8,
        azimuth_spread_departure: 0.4,
        zenith_spread_arrival: 0.15,
    };
    let mean_realized = |ds: f64| -> f64 {
        let drops = 1000u64;
        let mut acc = 0.0;
        for k in 0..drops {
            let mut rng = drop_rng(0xD5, k);
            let set = generate_clusters(&fixed_angles(ds), &params, &mut rng).unwrap();
            let pairs: Vec<(f64, f64)> =
                set.clusters.iter().map(|c| (c.delay, c.power)).collect();
            acc += rms_delay_spread(&pairs).unwrap();
        }
        acc / drops as f64
    };
    let at_20 = mean_realized(20e-9);
    let at_50 = mean_realized(50e-9);
    let at_100 = mean_realized(100e-9);
    assert!(at_20 < at_50 && at_50 < at_100);
    // Delays scale with the input spread and powers are scale-free, so the
    // realized spread is exactly linear in expectation. Common streams per
    // drop make the ratio tight even at 1000 drops.
    let ratio = at_100 / at_20;
    assert!((ratio - 5.0).abs() < 0.05, "ratio {ratio}");
    // Normalization and shadowing compress the realized spread below the
    // input value but never below half of it.
    assert!(at_100 / 100e-9 > 0.5 && at_100 / 100e-9 < 1.1);
}

#[test]
fn stochastic_tap_power_is_unbiased_over_ensemble() {
    let params = urban_params();
    let link = LinkGeometry::static_link(
        Vec3::new(0.0, 0.0, 1.6),
        Vec3::new(0.0, 26.0, 1.6),
        26.0e9,
    )
    .unwrap();
    let iso = AntennaArray::isotropic();
    let drops = 10_000u64;
    let mut acc = 0.0;
    for k in 0..drops {
        let mut rng = drop_rng(0xB1A5, k);
        let lsps = draw_lsps(&params, &mut rng).unwrap();
        let set = generate_clusters(&lsps, &params, &mut rng).unwrap();
        let taps = cluster_taps(&set, &link, &iso, &iso, 0.0).unwrap();
        acc += taps.iter().map(Tap::power).sum::<f64>();
    }
    let mean = acc / drops as f64;
    // Ray phases are uniform and independent, so the ensemble mean of the
    // summed tap power equals the summed cluster power, which is one.
    assert!((mean - 1.0).abs() <= 0.02, "ensemble mean {mean}");
}
