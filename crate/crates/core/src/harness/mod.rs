//! Metrics, k-fold cross-validation and experiment reports.

mod experiment;
mod folds;
mod metrics;

pub use experiment::{run_experiment, ExperimentConfig, FoldResult, Report, Summary, Variant, VariantReport};
pub use folds::FoldPlan;
pub use metrics::{accuracy, fidelity, macro_f1, mean_std};
