//! Delay-domain statistics and measurement table analysis.
//!
//! Three summaries of a tap list are provided: the power delay profile
//! (power histogram over uniform delay bins), the RMS delay spread (the
//! power-weighted standard deviation of the tap delays) and the empirical
//! CDF of scalar samples. The delay spread is invariant under a common
//! delay shift and under power rescaling; binning conserves total power.
//!
//! Separately, [`ScattererPowerTable`] parses angle-resolved power tables
//! as exported from sounder measurements: one labeled power column per
//! identified scatterer plus the total received target power per angle.
//! Power proportions per scatterer follow by summing columns over angle
//! and dividing by the summed totals.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use libm::sqrt;

/// Errors from metric computation or table parsing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MetricsError {
    /// No samples, or samples with zero total weight.
    EmptyInput,
    /// Structurally invalid numeric input.
    InvalidInput(&'static str),
    /// Malformed power table text, with the 1-based offending line.
    Parse { line: usize, message: &'static str },
}

impl fmt::Display for MetricsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricsError::EmptyInput => write!(f, "empty input"),
            MetricsError::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            MetricsError::Parse { line, message } => {
                write!(f, "parse error on line {line}: {message}")
            }
        }
    }
}

impl core::error::Error for MetricsError {}

/// Power delay profile over uniform delay bins starting at zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Pdp {
    bin_width: f64,
    powers: Vec<f64>,
}

impl Pdp {
    pub fn bin_width(&self) -> f64 {
        self.bin_width
    }

    /// Per-bin powers, indexed from the bin covering `[0, bin_width)`.
    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    /// Center delay of bin `k`.
    pub fn bin_center(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * self.bin_width
    }

    pub fn total_power(&self) -> f64 {
        self.powers.iter().sum()
    }

    /// `(center delay, power)` for bins holding nonzero power.
    pub fn occupied(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.powers
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(k, p)| (self.bin_center(k), *p))
    }

    /// Delay of the strongest bin (its center), or `None` when empty.
    pub fn peak_delay(&self) -> Option<f64> {
        self.powers
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).expect("powers are finite"))
            .map(|(k, _)| self.bin_center(k))
    }

    /// Multiplies all bin powers by `factor` (e.g. to average over drops).
    pub fn scale(&mut self, factor: f64) {
        for p in &mut self.powers {
            *p *= factor;
        }
    }
}

/// Bins `(delay, power)` pairs into a [`Pdp`]. Bin `k` covers delays in
/// `[k w, (k+1) w)`. Delays must be non-negative and powers finite and
/// non-negative; total power is conserved exactly.
pub fn compute_pdp(pairs: &[(f64, f64)], bin_width: f64) -> Result<Pdp, MetricsError> {
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return Err(MetricsError::InvalidInput("bin width must be positive"));
    }
    if pairs.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let mut powers: Vec<f64> = Vec::new();
    for &(delay, power) in pairs {
        if !(delay >= 0.0 && delay.is_finite()) {
            return Err(MetricsError::InvalidInput("delays must be non-negative"));
        }
        if !(power >= 0.0 && power.is_finite()) {
            return Err(MetricsError::InvalidInput("powers must be non-negative"));
        }
        let k = (delay / bin_width) as usize;
        if k >= powers.len() {
            powers.resize(k + 1, 0.0);
        }
        powers[k] += power;
    }
    Ok(Pdp { bin_width, powers })
}

/// RMS delay spread of `(delay, power)` pairs: the power-weighted standard
/// deviation of delay. Fails when no pair carries positive power.
pub fn rms_delay_spread(pairs: &[(f64, f64)]) -> Result<f64, MetricsError> {
    let mut total = 0.0;
    let mut first = 0.0;
    let mut second = 0.0;
    for &(delay, power) in pairs {
        if !(delay.is_finite() && power.is_finite()) || power < 0.0 {
            return Err(MetricsError::InvalidInput("weights must be finite and non-negative"));
        }
        total += power;
        first += power * delay;
        second += power * delay * delay;
    }
    if !(total > 0.0) {
        return Err(MetricsError::EmptyInput);
    }
    let mean = first / total;
    // Round-off can push the variance a hair below zero for a single tap.
    let var = (second / total - mean * mean).max(0.0);
    Ok(sqrt(var))
}

/// Empirical distribution of scalar samples.
#[derive(Clone, Debug, PartialEq)]
pub struct CdfTable {
    points: Vec<(f64, f64)>,
}

impl CdfTable {
    /// Sorted `(value, cumulative probability)` pairs; probabilities are
    /// `k / n` for the k-th smallest of n samples.
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Smallest value whose cumulative probability reaches `p`.
    pub fn quantile(&self, p: f64) -> f64 {
        let n = self.points.len();
        let idx = (libm::ceil(p * n as f64) as usize).clamp(1, n) - 1;
        self.points[idx].0
    }
}

/// Builds the empirical CDF of `samples`.
pub fn empirical_cdf(samples: &[f64]) -> Result<CdfTable, MetricsError> {
    if samples.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    if samples.iter().any(|s| !s.is_finite()) {
        return Err(MetricsError::InvalidInput("samples must be finite"));
    }
    let mut sorted: Vec<f64> = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("samples are finite"));
    let n = sorted.len() as f64;
    let points =
        sorted.into_iter().enumerate().map(|(k, v)| (v, (k + 1) as f64 / n)).collect();
    Ok(CdfTable { points })
}

/// Angle-resolved scatterer power table.
///
/// Input lines are comma separated. The header names the angle column, one
/// column per scatterer and the trailing total column:
///
/// ```text
/// angle_deg,<name>,...,<name>,target_total
/// ```
///
/// Each data row carries the angle, the per-scatterer powers (linear units)
/// and the total target power for that angle. The scatterer powers of a row
/// must partition its total to within a relative `1e-6`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScattererPowerTable {
    names: Vec<String>,
    /// Per row: angle, per-scatterer powers, target total.
    rows: Vec<(f64, Vec<f64>, f64)>,
}

impl ScattererPowerTable {
    const PARTITION_REL_TOL: f64 = 1e-6;

    pub fn parse(text: &str) -> Result<Self, MetricsError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (header_idx, header) =
            lines.next().ok_or(MetricsError::Parse { line: 1, message: "missing header" })?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols.len() < 3 || cols[0] != "angle_deg" || cols[cols.len() - 1] != "target_total" {
            return Err(MetricsError::Parse {
                line: header_idx + 1,
                message: "header must be angle_deg,<scatterer names>,target_total",
            });
        }
        let names: Vec<String> = cols[1..cols.len() - 1].iter().map(|s| String::from(*s)).collect();
        if names.iter().any(String::is_empty) {
            return Err(MetricsError::Parse {
                line: header_idx + 1,
                message: "scatterer names must be non-empty",
            });
        }
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return Err(MetricsError::Parse {
                    line: header_idx + 1,
                    message: "scatterer names must be unique",
                });
            }
        }

        let mut rows = Vec::new();
        for (idx, line) in lines {
            let lineno = idx + 1;
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != cols.len() {
                return Err(MetricsError::Parse {
                    line: lineno,
                    message: "row width does not match header",
                });
            }
            let mut values = Vec::with_capacity(fields.len());
            for f in &fields {
                let v: f64 = f.parse().map_err(|_| MetricsError::Parse {
                    line: lineno,
                    message: "field is not a number",
                })?;
                if !v.is_finite() {
                    return Err(MetricsError::Parse {
                        line: lineno,
                        message: "field is not finite",
                    });
                }
                values.push(v);
            }
            let angle = values[0];
            let target = values[values.len() - 1];
            let components = values[1..values.len() - 1].to_vec();
            if components.iter().any(|p| *p < 0.0) || target < 0.0 {
                return Err(MetricsError::Parse {
                    line: lineno,
                    message: "powers must be non-negative",
                });
            }
            let sum: f64 = components.iter().sum();
            let tol = Self::PARTITION_REL_TOL * if target > 1.0 { target } else { 1.0 };
            if libm::fabs(sum - target) > tol {
                return Err(MetricsError::Parse {
                    line: lineno,
                    message: "scatterer powers do not partition the target total",
                });
            }
            rows.push((angle, components, target));
        }
        if rows.is_empty() {
            return Err(MetricsError::Parse { line: header_idx + 2, message: "no data rows" });
        }
        Ok(ScattererPowerTable { names, rows })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Fraction of the total target power attributed to each scatterer,
    /// summed over all angles. Fractions sum to one when every row
    /// partitions its total exactly.
    pub fn power_proportions(&self) -> Result<Vec<(String, f64)>, MetricsError> {
        let total: f64 = self.rows.iter().map(|(_, _, t)| *t).sum();
        if !(total > 0.0) {
            return Err(MetricsError::EmptyInput);
        }
        Ok(self
            .names
            .iter()
            .enumerate()
            .map(|(i, name)| {
                let p: f64 = self.rows.iter().map(|(_, comps, _)| comps[i]).sum();
                (name.clone(), p / total)
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn two_equal_taps_spread_is_half_separation() {
        let pairs = [(100e-9, 0.5), (200e-9, 0.5)];
        assert_relative_eq!(rms_delay_spread(&pairs).unwrap(), 50e-9, max_relative = 1e-12);
    }

    #[test]
    fn single_tap_spread_is_zero() {
        assert_eq!(rms_delay_spread(&[(97e-9, 1.0)]).unwrap(), 0.0);
    }

    #[test]
    fn spread_is_shift_and_scale_invariant() {
        let pairs = [(10e-9, 0.2), (42e-9, 0.5), (97e-9, 0.3)];
        let base = rms_delay_spread(&pairs).unwrap();
        let shifted: Vec<(f64, f64)> = pairs.iter().map(|&(t, p)| (t + 55e-9, p)).collect();
        assert_relative_eq!(rms_delay_spread(&shifted).unwrap(), base, max_relative = 1e-9);
        let scaled: Vec<(f64, f64)> = pairs.iter().map(|&(t, p)| (t, 7.5 * p)).collect();
        assert_relative_eq!(rms_delay_spread(&scaled).unwrap(), base, max_relative = 1e-12);
    }

    #[test]
    fn unequal_two_tap_spread_matches_closed_form() {
        // Powers p, q at separation d: spread = d sqrt(p q) / (p + q).
        let (p, q, d) = (0.75, 0.25, 80e-9);
        let pairs = [(0.0, p), (d, q)];
        let expected = d * sqrt(p * q) / (p + q);
        assert_relative_eq!(rms_delay_spread(&pairs).unwrap(), expected, max_relative = 1e-12);
    }

    #[test]
    fn spread_rejects_degenerate_inputs() {
        assert_eq!(rms_delay_spread(&[]), Err(MetricsError::EmptyInput));
        assert_eq!(rms_delay_spread(&[(1e-9, 0.0)]), Err(MetricsError::EmptyInput));
        assert!(rms_delay_spread(&[(1e-9, -0.5)]).is_err());
        assert!(rms_delay_spread(&[(f64::NAN, 1.0)]).is_err());
    }

    #[test]
    fn binning_conserves_power_and_assigns_bins() {
        let w = 1.0 / 600e6;
        let pairs = [(0.0, 0.125), (0.4 * w, 0.25), (1.1 * w, 0.5), (6.9 * w, 0.125)];
        let pdp = compute_pdp(&pairs, w).unwrap();
        assert_relative_eq!(pdp.total_power(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(pdp.powers()[0], 0.375, epsilon = 1e-15);
        assert_relative_eq!(pdp.powers()[1], 0.5, epsilon = 1e-15);
        assert_relative_eq!(pdp.powers()[6], 0.125, epsilon = 1e-15);
        assert_eq!(pdp.powers().len(), 7);
        assert_relative_eq!(pdp.bin_center(0), 0.5 * w, max_relative = 1e-15);
        assert_eq!(pdp.occupied().count(), 3);
    }

    #[test]
    fn pdp_peak_tracks_strongest_bin() {
        let w = 10e-9;
        let pairs = [(5e-9, 0.2), (97e-9, 0.7), (140e-9, 0.1)];
        let pdp = compute_pdp(&pairs, w).unwrap();
        assert_relative_eq!(pdp.peak_delay().unwrap(), 95e-9, max_relative = 1e-12);
    }

    #[test]
    fn pdp_rejects_bad_inputs() {
        assert!(compute_pdp(&[], 1e-9).is_err());
        assert!(compute_pdp(&[(1e-9, 1.0)], 0.0).is_err());
        assert!(compute_pdp(&[(-1e-9, 1.0)], 1e-9).is_err());
        assert!(compute_pdp(&[(1e-9, -1.0)], 1e-9).is_err());
    }

    #[test]
    fn cdf_is_monotone_with_uniform_steps() {
        let cdf = empirical_cdf(&[3.0, 1.0, 2.0, 4.0]).unwrap();
        let pts = cdf.points();
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[0], (1.0, 0.25));
        assert_eq!(pts[3], (4.0, 1.0));
        for w in pts.windows(2) {
            assert!(w[0].0 <= w[1].0 && w[0].1 < w[1].1);
        }
        assert_eq!(cdf.quantile(0.5), 2.0);
        assert_eq!(cdf.quantile(0.51), 3.0);
        assert_eq!(cdf.quantile(1.0), 4.0);
    }

    #[test]
    fn cdf_rejects_empty_and_nan() {
        assert_eq!(empirical_cdf(&[]), Err(MetricsError::EmptyInput));
        assert!(empirical_cdf(&[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn power_table_roundtrip() {
        let text = "angle_deg,wall,lamp,target_total\n\
                    -30,4,1,5\n\
                    0,6,2,8\n\
                    30,2,1,3\n";
        let table = ScattererPowerTable::parse(text).unwrap();
        assert_eq!(table.names(), ["wall", "lamp"]);
        assert_eq!(table.num_rows(), 3);
        let props = table.power_proportions().unwrap();
        assert_relative_eq!(props[0].1, 12.0 / 16.0, epsilon = 1e-15);
        assert_relative_eq!(props[1].1, 4.0 / 16.0, epsilon = 1e-15);
        let sum: f64 = props.iter().map(|(_, p)| p).sum();
        assert_relative_eq!(sum, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn power_table_rejects_malformed_input() {
        let cases: [(&str, usize); 6] = [
            ("angle,wall,target_total\n0,1,1\n", 1),
            ("angle_deg,,target_total\n0,1,1\n", 1),
            ("angle_deg,wall,wall,target_total\n0,1,1,2\n", 1),
            ("angle_deg,wall,target_total\n0,1\n", 2),
            ("angle_deg,wall,target_total\n0,x,1\n", 2),
            ("angle_deg,wall,target_total\n0,-1,1\n", 2),
        ];
        for (text, line) in cases {
            match ScattererPowerTable::parse(text) {
                Err(MetricsError::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
        // Partition violation beyond the relative tolerance.
        let bad = "angle_deg,wall,lamp,target_total\n0,1,1,3\n";
        assert!(matches!(
            ScattererPowerTable::parse(bad),
            Err(MetricsError::Parse { line: 2, .. })
        ));
        // Within tolerance passes.
        let ok = "angle_deg,wall,lamp,target_total\n0,1.0000005,1,2.000001\n";
        assert!(ScattererPowerTable::parse(ok).is_ok());
        // Empty table.
        assert!(matches!(
            ScattererPowerTable::parse("angle_deg,wall,target_total\n"),
            Err(MetricsError::Parse { .. })
        ));
    }
}
