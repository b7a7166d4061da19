//! Experiment runner for the pseudo supervisor: TOML configuration, seed
//! sweeps, method comparisons, β/γ ablations and CSV output.

pub mod args;
pub mod config;
pub mod error;
pub mod runner;

pub use config::{AblationConfig, DatasetConfig, ExperimentConfig, Method};
pub use error::{CliError, Result};
pub use runner::{
    analyze_correlation, build_splits, compare_methods, generate_data, run_ablation, run_experiment, split_hash,
    AblationReport, Comparison, ExperimentReport, MethodSummary,
};
