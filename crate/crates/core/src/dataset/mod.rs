//! Tabular data: loading, discretization and train/test splits.

mod discretize;
mod load;
mod split;

pub use discretize::{discretize, CodedMatrix, Discretizer};
pub use load::{load_csv, LoadOptions, MissingPolicy, TargetColumn};
pub use split::{split, split_indices, SplitSpec};
pub(crate) use split::split_indices_on;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("target column {0} not found in header")]
    MissingTarget(String),
    #[error("row {row}, column '{column}': {reason}")]
    BadCell {
        row: usize,
        column: String,
        reason: String,
    },
    #[error("target has fewer than 2 classes")]
    TooFewClasses,
    #[error("dataset has no feature columns")]
    NoFeatures,
    #[error("dataset has no rows")]
    Empty,
    #[error("inconsistent shape: {0}")]
    Shape(String),
    #[error("invalid split: {0}")]
    InvalidSplit(String),
    #[error("class '{class}' has {size} row(s); stratified split needs at least 2")]
    ClassTooSmall { class: String, size: usize },
}

/// A loaded dataset: raw numeric features stored column-major plus an
/// integer-coded categorical target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    /// `features[j][i]` is feature `j` of row `i`.
    pub features: Vec<Vec<f64>>,
    pub feature_names: Vec<String>,
    /// Class codes in `0..class_names.len()`.
    pub target: Vec<u32>,
    pub class_names: Vec<String>,
    /// Number of input rows dropped by the missing-value policy.
    #[serde(default)]
    pub dropped_rows: usize,
    /// Zero-based data row index of each row in the source file.
    #[serde(default)]
    pub source_rows: Vec<usize>,
}

impl Dataset {
    /// Builds a dataset from columns, validating shape and target codes.
    pub fn new(
        features: Vec<Vec<f64>>,
        feature_names: Vec<String>,
        target: Vec<u32>,
        class_names: Vec<String>,
    ) -> Result<Self, DatasetError> {
        let n = target.len();
        if n == 0 {
            return Err(DatasetError::Empty);
        }
        if features.len() != feature_names.len() {
            return Err(DatasetError::Shape(format!(
                "{} feature columns but {} names",
                features.len(),
                feature_names.len()
            )));
        }
        if let Some((j, _)) = features.iter().enumerate().find(|(_, c)| c.len() != n) {
            return Err(DatasetError::Shape(format!(
                "column '{}' has {} rows, target has {n}",
                feature_names[j],
                features[j].len()
            )));
        }
        let n_classes = class_names.len();
        if n_classes < 2 {
            return Err(DatasetError::TooFewClasses);
        }
        let mut seen = vec![false; n_classes];
        for (i, &y) in target.iter().enumerate() {
            let Some(slot) = seen.get_mut(y as usize) else {
                return Err(DatasetError::BadCell {
                    row: i + 1,
                    column: "<target>".into(),
                    reason: format!("class code {y} out of range"),
                });
            };
            *slot = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(DatasetError::TooFewClasses);
        }
        Ok(Self {
            features,
            feature_names,
            target,
            class_names,
            dropped_rows: 0,
            source_rows: (0..n).collect(),
        })
    }

    pub fn n_rows(&self) -> usize {
        self.target.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    /// Row subset in the given order. Class names are kept even when a class
    /// is absent from the subset.
    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        Dataset {
            features: self
                .features
                .iter()
                .map(|col| rows.iter().map(|&i| col[i]).collect())
                .collect(),
            feature_names: self.feature_names.clone(),
            target: rows.iter().map(|&i| self.target[i]).collect(),
            class_names: self.class_names.clone(),
            dropped_rows: self.dropped_rows,
            source_rows: rows.iter().map(|&i| self.source_rows[i]).collect(),
        }
    }

    /// Column subset in the given order.
    pub fn select_features(&self, cols: &[usize]) -> Dataset {
        Dataset {
            features: cols.iter().map(|&j| self.features[j].clone()).collect(),
            feature_names: cols.iter().map(|&j| self.feature_names[j].clone()).collect(),
            target: self.target.clone(),
            class_names: self.class_names.clone(),
            dropped_rows: self.dropped_rows,
            source_rows: self.source_rows.clone(),
        }
    }

    /// Per-class row counts.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &y in &self.target {
            counts[y as usize] += 1;
        }
        counts
    }
}
