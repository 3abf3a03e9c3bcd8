//! Per-view baseline models, AUC-weighted ensembles and evaluation metrics.

mod combine;
mod evaluate;
mod import;
mod logistic;
mod metrics;

pub use combine::{ensemble_predict, ensemble_weights, EnsembleSpec};
pub use evaluate::{
    ensemble_name, evaluate_builtin, evaluate_imported, view_model_name, EvaluateConfig, Evaluation,
    TrainingSummary, WeightSource, ALL_MODEL,
};
pub use import::{read_proba_csv, ImportedProba};
pub use logistic::{train_builtin, LogisticConfig, ModelKind, ProbModel};
pub use metrics::{
    argmax, binary_auc, macro_auc, metrics, row_entropy, validate_proba, MetricReport,
    ROW_SUM_TOLERANCE,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EnsembleError {
    #[error("training data contains a single class")]
    SingleClass,
    #[error("{0}")]
    Shape(String),
    #[error("expected {expected} classes, found {found}")]
    ClassMismatch { expected: usize, found: usize },
    #[error("no ensemble members")]
    NoMembers,
    #[error("invalid member AUC {0}")]
    BadAuc(f64),
    #[error("AUC undefined: every row belongs to one class")]
    UndefinedAuc,
    #[error("model has no coefficients to predict with")]
    NotPredictive,
    #[error("{path}, row {row}: {reason}")]
    BadProbabilities { path: String, row: usize, reason: String },
    #[error("{path}: {source}")]
    Csv { path: String, source: csv::Error },
}
