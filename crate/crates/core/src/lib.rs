//! Semi-supervised classification with a policy-gradient pseudo-label supervisor.
//!
//! A policy network proposes pseudo labels for unlabeled samples. The
//! classifier is updated on labeled plus pseudo-labeled mini-batches, and the
//! change in its loss on a fixed validation mini-batch becomes the reward that
//! trains the policy with discounted REINFORCE.
//!
//! Everything runs on a small dense substrate ([`nn`]) in 64-bit floats so that
//! every run is reproducible bit-for-bit from its seed.
//!
//! - [`nn`]: matrices, multilayer perceptrons, cross-entropy, AdamW, checkpoints.
//! - [`data`]: synthetic generators, splits, quality control, progression labels,
//!   multimodal concatenation, weak augmentation and the dataset file format.
//! - [`ssl`]: the pseudo supervisor training loop and its baselines.
//! - [`metrics`]: accuracy, F1, ROC AUC and correlation densities.

pub mod data;
pub mod error;
pub mod metrics;
pub mod nn;
pub mod rng;
pub mod ssl;

pub use data::{DatasetSplits, Sample};
pub use error::{Error, Result};
pub use metrics::MetricsReport;
pub use nn::{AdamW, Matrix, MlpModel};
pub use ssl::{EngineConfig, History, PolicyModel, TrainOutput};
