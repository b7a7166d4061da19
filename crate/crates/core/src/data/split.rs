use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{DatasetSplits, Sample};
use crate::error::{ensure, Result};
use crate::rng;

/// Train / validation / test proportions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitFractions {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl SplitFractions {
    pub fn new(train: f64, val: f64, test: f64) -> Self {
        SplitFractions { train, val, test }
    }
}

impl Default for SplitFractions {
    fn default() -> Self {
        SplitFractions::new(0.7, 0.1, 0.2)
    }
}

/// Shuffles and partitions labeled samples. Within train, the first
/// `round(label_fraction · n_train)` keep their labels; the rest become unlabeled.
pub fn split_dataset(
    samples: &[Sample],
    label_fraction: f64,
    fractions: SplitFractions,
    seed: u64,
) -> Result<DatasetSplits> {
    let SplitFractions { train, val, test } = fractions;
    ensure!(
        [train, val, test].iter().all(|f| f.is_finite() && *f >= 0.0),
        "split fractions must be non-negative"
    );
    ensure!(
        (train + val + test - 1.0).abs() <= 1e-9,
        "split fractions sum to {}, expected 1",
        train + val + test
    );
    ensure!(
        label_fraction > 0.0 && label_fraction <= 1.0,
        "label_fraction must be in (0, 1], got {}",
        label_fraction
    );
    if let Some(s) = samples.iter().find(|s| s.label.is_none()) {
        return Err(crate::Error::invalid(format!(
            "cannot split: sample {} has no label",
            s.id
        )));
    }

    let n = samples.len();
    let n_train = ((train * n as f64).round() as usize).min(n);
    let n_val = ((val * n as f64).round() as usize).min(n - n_train);
    let n_test = n - n_train - n_val;
    let n_labeled = ((label_fraction * n_train as f64).round() as usize).min(n_train);
    ensure!(n_labeled > 0, "labeled train partition would be empty");
    ensure!(n_val > 0, "validation partition would be empty");
    ensure!(n_test > 0, "test partition would be empty");

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng::stream(seed, "split"));
    let pick = |range: std::ops::Range<usize>| -> Vec<Sample> {
        order[range].iter().map(|&i| samples[i].clone()).collect()
    };
    DatasetSplits::new(
        pick(0..n_labeled),
        pick(n_labeled..n_train),
        pick(n_train..n_train + n_val),
        pick(n_train + n_val..n),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::generate_overlapping_gaussians;

    #[test]
    fn partition_sizes() {
        let s = generate_overlapping_gaussians(50, 2, 1.0, 0).unwrap();
        let sp = split_dataset(&s, 0.5, SplitFractions::new(0.7, 0.1, 0.2), 3).unwrap();
        assert_eq!(sp.labeled_train().len(), 35);
        assert_eq!(sp.unlabeled_train().len(), 35);
        assert_eq!(sp.validation().len(), 10);
        assert_eq!(sp.test().len(), 20);
        assert!(sp.hidden_labels().iter().all(|l| l.is_some()));
    }

    #[test]
    fn full_label_fraction_leaves_no_unlabeled() {
        let s = generate_overlapping_gaussians(50, 2, 1.0, 0).unwrap();
        let sp = split_dataset(&s, 1.0, SplitFractions::default(), 3).unwrap();
        assert!(sp.unlabeled_train().is_empty());
        assert_eq!(sp.labeled_train().len(), 70);
    }

    #[test]
    fn invalid_arguments() {
        let s = generate_overlapping_gaussians(5, 2, 1.0, 0).unwrap();
        assert!(split_dataset(&s, 0.5, SplitFractions::new(0.7, 0.1, 0.1), 0).is_err());
        assert!(split_dataset(&s, 0.0, SplitFractions::default(), 0).is_err());
        assert!(split_dataset(&s, 1.5, SplitFractions::default(), 0).is_err());
        assert!(split_dataset(&s, 0.5, SplitFractions::new(1.0, 0.0, 0.0), 0).is_err());
        assert!(split_dataset(&s[..2], 0.5, SplitFractions::default(), 0).is_err());
    }
}
