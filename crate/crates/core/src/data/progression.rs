//! Longitudinal visual-field trends and the TD / MD progression criteria.

use crate::error::{ensure, Result};

use super::VF_LOCATIONS;

pub const TD_MIN_DB: f64 = -38.0;
pub const TD_MAX_DB: f64 = 26.0;
/// Slope threshold in dB per year, inclusive.
pub const SLOPE_THRESHOLD: f64 = -1.0;
/// Minimum number of locations at or below the slope threshold.
pub const TD_MIN_LOCATIONS: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct LongitudinalSeries {
    timestamps: Vec<f64>,
    td_values: Vec<[f64; VF_LOCATIONS]>,
    md_values: Vec<f64>,
}

impl LongitudinalSeries {
    /// `timestamps` in years, strictly increasing; one TD vector and one MD value per visit.
    pub fn new(
        timestamps: Vec<f64>,
        td_values: Vec<[f64; VF_LOCATIONS]>,
        md_values: Vec<f64>,
    ) -> Result<Self> {
        ensure!(
            timestamps.len() >= 2,
            "slope fitting needs at least 2 visits, got {}",
            timestamps.len()
        );
        ensure!(
            td_values.len() == timestamps.len() && md_values.len() == timestamps.len(),
            "visit count mismatch: {} timestamps, {} TD vectors, {} MD values",
            timestamps.len(),
            td_values.len(),
            md_values.len()
        );
        ensure!(
            timestamps.iter().all(|t| t.is_finite()) && timestamps.windows(2).all(|w| w[0] < w[1]),
            "timestamps must be finite and strictly increasing"
        );
        ensure!(
            td_values
                .iter()
                .flatten()
                .all(|v| (TD_MIN_DB..=TD_MAX_DB).contains(v)),
            "TD values must lie in [{}, {}] dB",
            TD_MIN_DB,
            TD_MAX_DB
        );
        ensure!(md_values.iter().all(|v| v.is_finite()), "MD values must be finite");
        Ok(LongitudinalSeries {
            timestamps,
            td_values,
            md_values,
        })
    }

    pub fn timestamps(&self) -> &[f64] {
        &self.timestamps
    }

    pub fn visits(&self) -> usize {
        self.timestamps.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProgressionLabels {
    pub td_progression: bool,
    pub md_fast_progression: bool,
    pub location_slopes: [f64; VF_LOCATIONS],
    pub md_slope: f64,
}

/// Least-squares slope of `values` against `t`, via centred sums.
pub fn ols_slope(t: &[f64], values: &[f64]) -> Result<f64> {
    ensure!(t.len() == values.len(), "length mismatch");
    ensure!(t.len() >= 2, "need at least two points");
    let n = t.len() as f64;
    let t_mean = t.iter().sum::<f64>() / n;
    let v_mean = values.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (ti, vi) in t.iter().zip(values) {
        let dt = ti - t_mean;
        sxy += dt * (vi - v_mean);
        sxx += dt * dt;
    }
    ensure!(sxx > 0.0, "timestamps have zero spread");
    Ok(sxy / sxx)
}

pub fn derive_progression_labels(series: &LongitudinalSeries) -> Result<ProgressionLabels> {
    let t = &series.timestamps;
    let mut location_slopes = [0.0; VF_LOCATIONS];
    let mut column = vec![0.0; t.len()];
    for (loc, slope) in location_slopes.iter_mut().enumerate() {
        for (c, visit) in column.iter_mut().zip(&series.td_values) {
            *c = visit[loc];
        }
        *slope = ols_slope(t, &column)?;
    }
    let md_slope = ols_slope(t, &series.md_values)?;
    let declining = location_slopes
        .iter()
        .filter(|&&s| s <= SLOPE_THRESHOLD)
        .count();
    Ok(ProgressionLabels {
        td_progression: declining >= TD_MIN_LOCATIONS,
        md_fast_progression: md_slope <= SLOPE_THRESHOLD,
        location_slopes,
        md_slope,
    })
}
