use std::collections::HashSet;

use crate::error::{ensure, Error, Result};
use crate::nn::Matrix;

/// One feature vector with an optional class label.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub id: u64,
    pub features: Vec<f64>,
    pub label: Option<usize>,
    /// `(height, width)` when the leading `height * width` features form a grid.
    pub grid_dims: Option<(usize, usize)>,
}

impl Sample {
    pub fn labeled(id: u64, features: Vec<f64>, label: usize) -> Self {
        Sample {
            id,
            features,
            label: Some(label),
            grid_dims: None,
        }
    }

    pub fn unlabeled(id: u64, features: Vec<f64>) -> Self {
        Sample {
            id,
            features,
            label: None,
            grid_dims: None,
        }
    }

    pub fn with_grid(mut self, height: usize, width: usize) -> Self {
        self.grid_dims = Some((height, width));
        self
    }

    pub fn grid_len(&self) -> Option<usize> {
        self.grid_dims.map(|(h, w)| h * w)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if let Some((h, w)) = self.grid_dims {
            ensure!(
                h > 0 && w > 0 && h * w <= self.features.len(),
                "sample {}: grid {}x{} does not fit {} features",
                self.id,
                h,
                w,
                self.features.len()
            );
        }
        ensure!(
            self.features.iter().all(|v| v.is_finite()),
            "sample {}: non-finite feature",
            self.id
        );
        Ok(())
    }
}

/// Stacks sample features into a `len × n_features` matrix.
pub fn features_matrix(samples: &[Sample]) -> Result<Matrix> {
    let rows: Vec<&[f64]> = samples.iter().map(|s| s.features.as_slice()).collect();
    Matrix::from_rows(&rows)
}

/// Labels of fully labeled samples.
pub fn labels_of(samples: &[Sample]) -> Result<Vec<usize>> {
    samples
        .iter()
        .map(|s| {
            s.label
                .ok_or_else(|| Error::invalid(format!("sample {} has no label", s.id)))
        })
        .collect()
}

/// Labeled train, unlabeled train, validation and test partitions.
///
/// Unlabeled samples never carry a label. Ground truth for them, when known,
/// is held separately and only reachable through [`DatasetSplits::hidden_labels`].
#[derive(Clone, Debug, PartialEq)]
pub struct DatasetSplits {
    labeled_train: Vec<Sample>,
    unlabeled_train: Vec<Sample>,
    validation: Vec<Sample>,
    test: Vec<Sample>,
    hidden_labels: Vec<Option<usize>>,
}

impl DatasetSplits {
    /// Labels present on `unlabeled` are moved into the hidden ground truth.
    pub fn new(
        labeled_train: Vec<Sample>,
        unlabeled: Vec<Sample>,
        validation: Vec<Sample>,
        test: Vec<Sample>,
    ) -> Result<Self> {
        let mut hidden_labels = Vec::with_capacity(unlabeled.len());
        let unlabeled_train = unlabeled
            .into_iter()
            .map(|mut s| {
                hidden_labels.push(s.label.take());
                s
            })
            .collect();
        let splits = DatasetSplits {
            labeled_train,
            unlabeled_train,
            validation,
            test,
            hidden_labels,
        };
        splits.validate()?;
        Ok(splits)
    }

    fn validate(&self) -> Result<()> {
        for (name, part) in [
            ("labeled_train", &self.labeled_train),
            ("validation", &self.validation),
            ("test", &self.test),
        ] {
            if let Some(s) = part.iter().find(|s| s.label.is_none()) {
                return Err(Error::invalid(format!(
                    "{} sample {} has no label",
                    name, s.id
                )));
            }
        }
        let mut seen = HashSet::new();
        let mut n_features = None;
        for s in self.all_samples() {
            ensure!(seen.insert(s.id), "sample id {} appears more than once", s.id);
            s.validate()?;
            match n_features {
                None => n_features = Some(s.features.len()),
                Some(n) => ensure!(
                    n == s.features.len(),
                    "sample {} has {} features, expected {}",
                    s.id,
                    s.features.len(),
                    n
                ),
            }
        }
        Ok(())
    }

    pub fn labeled_train(&self) -> &[Sample] {
        &self.labeled_train
    }

    pub fn unlabeled_train(&self) -> &[Sample] {
        &self.unlabeled_train
    }

    pub fn validation(&self) -> &[Sample] {
        &self.validation
    }

    pub fn test(&self) -> &[Sample] {
        &self.test
    }

    /// Ground truth for `unlabeled_train`, index-aligned. Diagnostics only.
    pub fn hidden_labels(&self) -> &[Option<usize>] {
        &self.hidden_labels
    }

    pub fn n_features(&self) -> usize {
        self.all_samples().next().map_or(0, |s| s.features.len())
    }

    pub fn grid_dims(&self) -> Option<(usize, usize)> {
        self.all_samples().next().and_then(|s| s.grid_dims)
    }

    pub fn all_samples(&self) -> impl Iterator<Item = &Sample> {
        self.labeled_train
            .iter()
            .chain(&self.unlabeled_train)
            .chain(&self.validation)
            .chain(&self.test)
    }

    pub fn len(&self) -> usize {
        self.labeled_train.len() + self.unlabeled_train.len() + self.validation.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Copy with the unlabeled partition dropped.
    pub fn without_unlabeled(&self) -> Self {
        DatasetSplits {
            unlabeled_train: Vec::new(),
            hidden_labels: Vec::new(),
            ..self.clone()
        }
    }
}
