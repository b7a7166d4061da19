//! Weak augmentation: random horizontal flip, then a random crop resized back
//! to the original grid by nearest neighbour.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::Sample;
use crate::error::{Error, Result};
use crate::rng::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AugmentConfig {
    pub flip_prob: f64,
    /// Crop side lengths are drawn per axis as a fraction in `[scale_min, scale_max]`.
    pub scale_min: f64,
    pub scale_max: f64,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        AugmentConfig {
            flip_prob: 0.5,
            scale_min: 0.8,
            scale_max: 1.0,
        }
    }
}

/// A concrete draw of the augmentation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AugmentParams {
    pub flip: bool,
    pub crop_h: usize,
    pub crop_w: usize,
    pub top: usize,
    pub left: usize,
}

impl AugmentParams {
    pub fn identity(height: usize, width: usize) -> Self {
        AugmentParams {
            flip: false,
            crop_h: height,
            crop_w: width,
            top: 0,
            left: 0,
        }
    }
}

fn crop_side(len: usize, scale: f64) -> usize {
    ((scale * len as f64).round() as usize).clamp(1, len)
}

pub fn draw_augment(height: usize, width: usize, cfg: &AugmentConfig, rng: &mut Rng) -> AugmentParams {
    let flip = rng.random::<f64>() < cfg.flip_prob;
    let mut scale = || {
        if cfg.scale_max > cfg.scale_min {
            rng.random_range(cfg.scale_min..=cfg.scale_max)
        } else {
            cfg.scale_max
        }
    };
    let crop_h = crop_side(height, scale());
    let crop_w = crop_side(width, scale());
    let top = rng.random_range(0..=height - crop_h);
    let left = rng.random_range(0..=width - crop_w);
    AugmentParams {
        flip,
        crop_h,
        crop_w,
        top,
        left,
    }
}

/// Applies `params` to the grid prefix of `sample`; trailing features are kept as is.
pub fn apply_augment(sample: &Sample, params: &AugmentParams) -> Result<Sample> {
    let (h, w) = sample
        .grid_dims
        .ok_or_else(|| Error::invalid(format!("sample {} has no grid", sample.id)))?;
    sample.validate()?;
    let p = params;
    if p.crop_h == 0 || p.crop_w == 0 || p.top + p.crop_h > h || p.left + p.crop_w > w {
        return Err(Error::invalid(format!(
            "crop {}x{} at ({}, {}) does not fit a {}x{} grid",
            p.crop_h, p.crop_w, p.top, p.left, h, w
        )));
    }
    let src = &sample.features[..h * w];
    let flipped = |i: usize, j: usize| {
        let j = if p.flip { w - 1 - j } else { j };
        src[i * w + j]
    };
    let mut out = sample.clone();
    for i in 0..h {
        let si = p.top + i * p.crop_h / h;
        for j in 0..w {
            let sj = p.left + j * p.crop_w / w;
            out.features[i * w + j] = flipped(si, sj);
        }
    }
    Ok(out)
}

pub fn augment_weak(sample: &Sample, cfg: &AugmentConfig, rng: &mut Rng) -> Result<Sample> {
    let (h, w) = sample
        .grid_dims
        .ok_or_else(|| Error::invalid(format!("sample {} has no grid", sample.id)))?;
    let params = draw_augment(h, w, cfg, rng);
    apply_augment(sample, &params)
}
