use serde::{Deserialize, Serialize};

use crate::data::Sample;
use crate::error::{ensure, Result};

/// Pearson correlation, or `None` when either vector has zero variance.
pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return None;
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return None;
    }
    Some((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

/// Fixed-width histogram over `[-1, 1]`, normalized to a density.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_centers: Vec<f64>,
    pub counts: Vec<usize>,
    pub density: Vec<f64>,
}

impl Histogram {
    pub fn over_unit_interval(values: &[f64], bins: usize) -> Self {
        let width = 2.0 / bins as f64;
        let mut counts = vec![0usize; bins];
        for &v in values {
            let b = (((v + 1.0) / width).floor() as usize).min(bins - 1);
            counts[b] += 1;
        }
        let total = values.len().max(1) as f64;
        Histogram {
            bin_centers: (0..bins).map(|i| -1.0 + (i as f64 + 0.5) * width).collect(),
            density: counts.iter().map(|&c| c as f64 / (total * width)).collect(),
            counts,
        }
    }

    /// `bin_center,density` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("bin_center,density\n");
        for (c, d) in self.bin_centers.iter().zip(&self.density) {
            s.push_str(&format!("{:.16e},{:.16e}\n", c, d));
        }
        s
    }
}

/// Pairwise correlations split by whether the two samples share a label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationDensity {
    pub within_group: Vec<f64>,
    pub between_group: Vec<f64>,
    pub within_hist: Histogram,
    pub between_hist: Histogram,
    /// Pairs dropped because one side had zero variance.
    pub skipped_pairs: usize,
}

pub fn correlation_density(samples: &[Sample], bins: usize) -> Result<CorrelationDensity> {
    ensure!(bins >= 1, "histogram needs at least one bin");
    let mut per_class = std::collections::BTreeMap::<usize, usize>::new();
    for s in samples {
        let l = s
            .label
            .ok_or_else(|| crate::Error::invalid(format!("sample {} has no label", s.id)))?;
        *per_class.entry(l).or_default() += 1;
    }
    ensure!(
        !per_class.is_empty() && per_class.values().all(|&c| c >= 2),
        "need at least two samples per class, got {:?}",
        per_class
    );
    let (mut within, mut between, mut skipped) = (Vec::new(), Vec::new(), 0);
    for i in 0..samples.len() {
        for j in i + 1..samples.len() {
            match pearson(&samples[i].features, &samples[j].features) {
                Some(r) if samples[i].label == samples[j].label => within.push(r),
                Some(r) => between.push(r),
                None => skipped += 1,
            }
        }
    }
    Ok(CorrelationDensity {
        within_hist: Histogram::over_unit_interval(&within, bins),
        between_hist: Histogram::over_unit_interval(&between, bins),
        within_group: within,
        between_group: between,
        skipped_pairs: skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pearson_extremes() {
        let v = [1.0, 2.0, 3.0];
        assert!((pearson(&v, &v).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson(&v, &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
        assert_eq!(pearson(&v, &[1.0, 1.0, 1.0]), None);
    }

    #[test]
    fn routing_and_histogram() {
        let s = vec![
            Sample::labeled(0, vec![1.0, 2.0, 3.0], 0),
            Sample::labeled(1, vec![1.0, 2.0, 3.5], 0),
            Sample::labeled(2, vec![3.0, 2.0, 1.0], 1),
            Sample::labeled(3, vec![3.0, 2.5, 1.0], 1),
            Sample::labeled(4, vec![1.0, 1.0, 1.0], 1),
        ];
        let d = correlation_density(&s, 50).unwrap();
        assert_eq!(d.within_group.len() + d.between_group.len() + d.skipped_pairs, 10);
        assert_eq!(d.skipped_pairs, 4);
        assert_eq!(d.within_group.len(), 2);
        assert!(d.between_group.iter().all(|&r| r < -0.9));
        let h = &d.between_hist;
        assert_eq!(h.counts.iter().sum::<usize>(), 4);
        let integral: f64 = h.density.iter().sum::<f64>() * (2.0 / 50.0);
        assert!((integral - 1.0).abs() < 1e-12);
        assert!(h.to_csv().starts_with("bin_center,density\n"));
    }

    #[test]
    fn needs_two_per_class() {
        let s = vec![
            Sample::labeled(0, vec![1.0, 2.0], 0),
            Sample::labeled(1, vec![1.0, 3.0], 0),
            Sample::labeled(2, vec![3.0, 2.0], 1),
        ];
        assert!(correlation_density(&s, 10).is_err());
    }
}
