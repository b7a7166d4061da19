//! Synthetic two-class data with a controllable overlap.
//!
//! Both classes share unit covariance; their means sit at `∓separation / 2`
//! along a unit direction, so the Bayes AUC is `Φ(separation / √2)`.

use rand::Rng as _;
use rand_distr::StandardNormal;

use super::multimodal::{concat_modalities, VF_LOCATIONS};
use super::Sample;
use crate::error::{ensure, Result};
use crate::rng::{self, Rng};

fn gaussian(rng: &mut Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn check_counts(n_per_class: usize, dim: usize, separation: f64) -> Result<()> {
    ensure!(n_per_class >= 1, "n_per_class must be at least 1");
    ensure!(dim >= 1, "dimension must be at least 1");
    ensure!(
        separation.is_finite() && separation >= 0.0,
        "class separation must be finite and non-negative, got {}",
        separation
    );
    Ok(())
}

/// Class 0 first, then class 1; ids `0..2 * n_per_class`.
fn two_gaussians(
    n_per_class: usize,
    direction: &[f64],
    separation: f64,
    rng: &mut Rng,
) -> Vec<Sample> {
    let mut out = Vec::with_capacity(2 * n_per_class);
    for label in 0..2 {
        let sign = if label == 0 { -0.5 } else { 0.5 };
        for _ in 0..n_per_class {
            let id = out.len() as u64;
            let features = direction
                .iter()
                .map(|d| sign * separation * d + gaussian(rng))
                .collect();
            out.push(Sample::labeled(id, features, label));
        }
    }
    out
}

/// Two unit-covariance Gaussians whose means differ along the first axis only.
pub fn generate_overlapping_gaussians(
    n_per_class: usize,
    dim: usize,
    class_separation: f64,
    seed: u64,
) -> Result<Vec<Sample>> {
    check_counts(n_per_class, dim, class_separation)?;
    let mut direction = vec![0.0; dim];
    direction[0] = 1.0;
    let mut rng = rng::stream(seed, "synth/gaussians");
    Ok(two_gaussians(n_per_class, &direction, class_separation, &mut rng))
}

/// Unit-norm, left-right symmetric Gaussian bump centred on an `h × w` grid.
pub fn symmetric_bump(height: usize, width: usize) -> Vec<f64> {
    let cy = (height as f64 - 1.0) / 2.0;
    let cx = (width as f64 - 1.0) / 2.0;
    let sy = (height as f64 / 3.0).max(0.5);
    let sx = (width as f64 / 3.0).max(0.5);
    let mut bump: Vec<f64> = (0..height)
        .flat_map(|i| {
            (0..width).map(move |j| {
                let dy = (i as f64 - cy) / sy;
                let dx = (j as f64 - cx) / sx;
                (-0.5 * (dy * dy + dx * dx)).exp()
            })
        })
        .collect();
    let norm = bump.iter().map(|v| v * v).sum::<f64>().sqrt();
    bump.iter_mut().for_each(|v| *v /= norm);
    bump
}

/// Grid-shaped variant: the class means differ along a smooth bump, so the
/// signal survives horizontal flips and mild crops.
pub fn generate_grid_gaussians(
    n_per_class: usize,
    height: usize,
    width: usize,
    class_separation: f64,
    seed: u64,
) -> Result<Vec<Sample>> {
    check_counts(n_per_class, height * width, class_separation)?;
    let direction = symmetric_bump(height, width);
    let mut rng = rng::stream(seed, "synth/grid");
    Ok(two_gaussians(n_per_class, &direction, class_separation, &mut rng)
        .into_iter()
        .map(|s| s.with_grid(height, width))
        .collect())
}

/// Grid modality plus a correlated 52-location vector modality, the latter
/// up-scaled to `vf_target_len` and appended after the grid.
///
/// The vector carries its own class shift of `∓separation / 2` spread evenly
/// over its locations, plus a shared component equal to half the grid noise
/// projected on the class direction.
pub fn generate_multimodal(
    n_per_class: usize,
    height: usize,
    width: usize,
    class_separation: f64,
    vf_target_len: usize,
    seed: u64,
) -> Result<Vec<Sample>> {
    let grid = generate_grid_gaussians(n_per_class, height, width, class_separation, seed)?;
    let direction = symmetric_bump(height, width);
    let unit = 1.0 / (VF_LOCATIONS as f64).sqrt();
    let mut rng = rng::stream(seed, "synth/vf");
    grid.into_iter()
        .map(|s| {
            let label = s.label.expect("generator output is labeled");
            let sign = if label == 0 { -0.5 } else { 0.5 };
            let noise_proj: f64 = s
                .features
                .iter()
                .zip(&direction)
                .map(|(x, d)| x * d)
                .sum::<f64>()
                - sign * class_separation;
            let vf: Vec<f64> = (0..VF_LOCATIONS)
                .map(|_| sign * class_separation * unit + 0.5 * noise_proj + gaussian(&mut rng))
                .collect();
            concat_modalities(&s, &vf, vf_target_len)
        })
        .collect()
}
