//! Fixtures shared by the criterion benchmarks in `benches/`.

use pseudosup_core::data::{generate_overlapping_gaussians, split_dataset, SplitFractions};
use pseudosup_core::nn::{Matrix, MlpModel};
use pseudosup_core::ssl::Batch;
use pseudosup_core::DatasetSplits;

/// Deterministic pseudo-random values in `[-1, 1)` without pulling in an RNG.
fn filler(n: usize, salt: u64) -> Vec<f64> {
    let mut state = salt.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
    (0..n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 52) as f64 - 1.0
        })
        .collect()
}

pub fn input_batch(rows: usize, cols: usize) -> Matrix {
    Matrix::new(rows, cols, filler(rows * cols, 1)).expect("finite fixture")
}

pub fn label_batch(rows: usize, cols: usize) -> Batch {
    let labels = (0..rows).map(|i| i % 2).collect();
    Batch::new(input_batch(rows, cols), labels).expect("consistent fixture")
}

pub fn classifier(input_dim: usize) -> MlpModel {
    MlpModel::init(&[input_dim, 64, 32, 2], 7).expect("valid dims")
}

/// Scores with frequent ties and labels that alternate.
pub fn scores_and_labels(n: usize) -> (Vec<f64>, Vec<usize>) {
    let scores = filler(n, 3).into_iter().map(|v| (v * 100.0).round()).collect();
    let labels = (0..n).map(|i| (i * 7 + i / 3) % 2).collect();
    (scores, labels)
}

pub fn desk_splits(n_per_class: usize, dim: usize) -> DatasetSplits {
    let samples = generate_overlapping_gaussians(n_per_class, dim, 1.0, 1).expect("valid generator args");
    split_dataset(&samples, 0.25, SplitFractions::new(0.5, 0.1, 0.4), 1).expect("valid split")
}
