//! Classification metrics and correlation analysis.

mod auc;
mod classification;
mod correlation;

pub use auc::auc_roc;
pub use classification::{accuracy, f1_binary, mean_and_std, MetricsReport};
pub use correlation::{correlation_density, pearson, CorrelationDensity, Histogram};
