use crate::error::{ensure, Result};

/// ROC AUC as the normalized Mann–Whitney U statistic, ties counting ½.
///
/// `labels` are 0/1; class 1 is positive.
pub fn auc_roc(scores: &[f64], labels: &[usize]) -> Result<f64> {
    ensure!(
        scores.len() == labels.len(),
        "{} scores for {} labels",
        scores.len(),
        labels.len()
    );
    ensure!(labels.iter().all(|&l| l <= 1), "AUC labels must be 0 or 1");
    ensure!(scores.iter().all(|s| !s.is_nan()), "scores must not be NaN");
    let n_pos = labels.iter().filter(|&&l| l == 1).count();
    let n_neg = labels.len() - n_pos;
    ensure!(
        n_pos > 0 && n_neg > 0,
        "AUC is undefined with a single class ({} positive, {} negative)",
        n_pos,
        n_neg
    );

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Walk tie groups in ascending score order. Each positive beats every
    // negative strictly below it and ties with the negatives in its group.
    let mut wins = 0.0;
    let mut neg_below = 0usize;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let group = &order[i..j];
        let pos = group.iter().filter(|&&k| labels[k] == 1).count();
        let neg = group.len() - pos;
        wins += pos as f64 * (neg_below as f64 + 0.5 * neg as f64);
        neg_below += neg;
        i = j;
    }
    Ok(wins / (n_pos as f64 * n_neg as f64))
}
