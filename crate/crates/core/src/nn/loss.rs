use super::Matrix;
use crate::error::{ensure, Result};

fn log_sum_exp(row: &[f64]) -> f64 {
    let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + row.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Row-wise log-softmax, stabilized by subtracting the row max.
pub fn log_softmax_rows(logits: &Matrix) -> Matrix {
    let mut out = logits.clone();
    for r in 0..out.rows() {
        let row = out.row_mut(r);
        let lse = log_sum_exp(row);
        row.iter_mut().for_each(|v| *v -= lse);
    }
    out
}

pub fn softmax_rows(logits: &Matrix) -> Matrix {
    let mut out = logits.clone();
    for r in 0..out.rows() {
        let row = out.row_mut(r);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            sum += *v;
        }
        row.iter_mut().for_each(|v| *v /= sum);
    }
    out
}

/// Mean cross-entropy over the batch and its gradient with respect to the logits.
pub fn softmax_cross_entropy(logits: &Matrix, labels: &[usize]) -> Result<(f64, Matrix)> {
    let (b, c) = logits.shape();
    ensure!(
        labels.len() == b,
        "{} labels for a batch of {}",
        labels.len(),
        b
    );
    ensure!(b > 0, "cross-entropy of an empty batch");
    if let Some(bad) = labels.iter().find(|&&y| y >= c) {
        return Err(crate::Error::InvalidInput(format!(
            "label {} out of range for {} classes",
            bad, c
        )));
    }
    let mut grad = softmax_rows(logits);
    let inv_b = 1.0 / b as f64;
    let mut loss = 0.0;
    for (r, &y) in labels.iter().enumerate() {
        let row = logits.row(r);
        loss += log_sum_exp(row) - row[y];
        let g = grad.row_mut(r);
        g[y] -= 1.0;
        g.iter_mut().for_each(|v| *v *= inv_b);
    }
    Ok((loss * inv_b, grad))
}
