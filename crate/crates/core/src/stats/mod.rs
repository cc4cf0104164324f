//! Evaluation statistics: ROC/AUROC, paired bootstrap of macro-AUROC
//! differences, the one-sided Wilcoxon signed-rank test and reader-study
//! scoring.

mod bootstrap;
mod predictions;
mod reader;
mod roc;
mod wilcoxon;

use thiserror::Error;

pub use bootstrap::{bootstrap_auroc_diff, BootstrapCI, BootstrapOptions};
pub use predictions::{read_predictions, write_predictions, ScoredPredictions};
pub use reader::{
    read_responses, reader_study_scores, GroupAggregate, ReaderGroupScore, ReaderResponse,
    ReaderStudyScores,
};
pub use roc::{auroc, macro_auroc, per_class_auroc, roc_curve, trapezoid_area, RocCurve};
pub use wilcoxon::{wilcoxon_one_sided, WilcoxonMethod, WilcoxonResult, EXACT_MAX_N};

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("labels are all one value{}", .0.as_ref().map(|c| format!(" for class {c:?}")).unwrap_or_default())]
    DegenerateLabels(Option<String>),
    #[error("prediction sets disagree: {0}")]
    IdMismatch(String),
    #[error("every difference from the null median is zero")]
    AllZeroDifferences,
    #[error("empty group: {0}")]
    EmptyGroup(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("worker pool: {0}")]
    Pool(String),
    #[error("csv error in {path}: {message}")]
    Csv { path: String, message: String },
}
