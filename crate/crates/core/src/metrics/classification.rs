use serde::{Deserialize, Serialize};

use super::auc_roc;
use crate::error::{ensure, Result};
use crate::nn::Matrix;

fn check_pair(predictions: &[usize], labels: &[usize]) -> Result<()> {
    ensure!(
        predictions.len() == labels.len(),
        "{} predictions for {} labels",
        predictions.len(),
        labels.len()
    );
    ensure!(!labels.is_empty(), "no samples to score");
    Ok(())
}

pub fn accuracy(predictions: &[usize], labels: &[usize]) -> Result<f64> {
    check_pair(predictions, labels)?;
    let hits = predictions.iter().zip(labels).filter(|(p, l)| p == l).count();
    Ok(hits as f64 / labels.len() as f64)
}

/// Binary F1 for `positive`. Zero when precision + recall is zero, except that
/// it is 1 when there are neither predicted nor actual positives.
pub fn f1_binary(predictions: &[usize], labels: &[usize], positive: usize) -> Result<f64> {
    check_pair(predictions, labels)?;
    let (mut tp, mut fp, mut fneg) = (0usize, 0usize, 0usize);
    for (&p, &l) in predictions.iter().zip(labels) {
        match (p == positive, l == positive) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fneg += 1,
            (false, false) => {}
        }
    }
    if tp + fp + fneg == 0 {
        return Ok(1.0);
    }
    // 2PR/(P+R) reduces to 2TP/(2TP+FP+FN)
    Ok(2.0 * tp as f64 / (2 * tp + fp + fneg) as f64)
}

/// Test-set accuracy, F1 and AUC of a binary classifier.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub f1: f64,
    pub auc: f64,
    pub n_samples: usize,
    pub positive_class: usize,
}

impl MetricsReport {
    /// Predictions are the logit argmax (ties go to the lower class); AUC ranks
    /// samples by the logit margin of the positive class, which orders them like
    /// its softmax probability without saturating to ties.
    pub fn from_logits(logits: &Matrix, labels: &[usize], positive_class: usize) -> Result<Self> {
        ensure!(logits.cols() == 2, "binary metrics need 2 logit columns");
        ensure!(positive_class < 2, "positive class must be 0 or 1");
        ensure!(logits.rows() == labels.len(), "logit rows do not match labels");
        let predictions: Vec<usize> = logits
            .iter_rows()
            .map(|r| usize::from(r[1] > r[0]))
            .collect();
        let negative = 1 - positive_class;
        let scores: Vec<f64> = logits
            .iter_rows()
            .map(|r| r[positive_class] - r[negative])
            .collect();
        let binary: Vec<usize> = labels.iter().map(|&l| usize::from(l == positive_class)).collect();
        Ok(MetricsReport {
            accuracy: accuracy(&predictions, labels)?,
            f1: f1_binary(&predictions, labels, positive_class)?,
            auc: auc_roc(&scores, &binary)?,
            n_samples: labels.len(),
            positive_class,
        })
    }

    pub const CSV_HEADER: &'static str = "accuracy,f1,auc,n_samples,positive_class";

    pub fn csv_row(&self) -> String {
        format!(
            "{:.16e},{:.16e},{:.16e},{},{}",
            self.accuracy, self.f1, self.auc, self.n_samples, self.positive_class
        )
    }
}

/// Mean and sample standard deviation (n − 1 denominator; 0 for a single value).
pub fn mean_and_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accuracy_cases() {
        assert_eq!(accuracy(&[0, 1, 1], &[0, 1, 1]).unwrap(), 1.0);
        assert_eq!(accuracy(&[0, 1, 1], &[1, 0, 0]).unwrap(), 0.0);
        assert_eq!(accuracy(&[0, 1, 1, 0], &[0, 1, 0, 0]).unwrap(), 0.75);
        assert!(accuracy(&[0], &[0, 1]).is_err());
        assert!(accuracy(&[], &[]).is_err());
    }

    #[test]
    fn f1_cases() {
        assert_eq!(f1_binary(&[1, 0, 1], &[1, 0, 1], 1).unwrap(), 1.0);
        assert_eq!(f1_binary(&[0, 0, 0], &[1, 0, 1], 1).unwrap(), 0.0);
        assert_eq!(f1_binary(&[0, 0], &[0, 0], 1).unwrap(), 1.0);
        // TP=2, FP=1, FN=1
        let f = f1_binary(&[1, 1, 1, 0, 0], &[1, 1, 0, 1, 0], 1).unwrap();
        assert!((f - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn report_from_logits() {
        let logits = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0], [0.0, 2.0], [3.0, 0.0]]).unwrap();
        let r = MetricsReport::from_logits(&logits, &[1, 0, 0, 0], 1).unwrap();
        assert_eq!(r.accuracy, 0.75);
        assert_eq!(r.f1, 2.0 / 3.0);
        assert!((r.auc - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn sample_std() {
        let (m, s) = mean_and_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_and_std(&[7.0]), (7.0, 0.0));
    }
}
