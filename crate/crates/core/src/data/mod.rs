//! Datasets: generation, splitting, filtering, labeling and file I/O.

mod augment;
mod io;
mod multimodal;
mod progression;
mod qc;
mod sample;
mod split;
mod synth;

pub use augment::{apply_augment, augment_weak, draw_augment, AugmentConfig, AugmentParams};
pub use io::{load_dataset, read_dataset, save_dataset, write_dataset};
pub use multimodal::{concat_modalities, upscale_nearest, VF_LOCATIONS};
pub use progression::{derive_progression_labels, ols_slope, LongitudinalSeries, ProgressionLabels};
pub use qc::{qc_filter, QcRecord, QcReport};
pub use sample::{features_matrix, labels_of, DatasetSplits, Sample};
pub use split::{split_dataset, SplitFractions};
pub use synth::{
    generate_grid_gaussians, generate_multimodal, generate_overlapping_gaussians, symmetric_bump,
};
