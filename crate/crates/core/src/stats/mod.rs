//! Nonparametric comparison of models over repeated runs.

mod adjust;
mod effect;
mod rank;
pub mod special;
mod verdict;

pub use adjust::{adjust, Adjustment};
pub use effect::{bootstrap_ci, cliffs_delta, Magnitude};
pub use rank::{conover_posthoc, friedman, midranks, FriedmanResult};
pub use verdict::{
    win_tie_loss, ComparisonVerdict, MetricInput, MetricVerdicts, Outcome, VerdictOptions, WtlCounts,
};

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("run matrix needs at least 2 treatments and 2 blocks, got {treatments} x {blocks}")]
    TooSmall { treatments: usize, blocks: usize },
    #[error("row {row} has {found} values, expected {expected}")]
    Ragged { row: usize, expected: usize, found: usize },
    #[error("non-finite value at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },
    #[error("p-value {0} outside [0, 1]")]
    PValueRange(f64),
    #[error("empty sample")]
    EmptySample,
    #[error("bootstrap needs at least 100 replicates, got {0}")]
    TooFewReplicates(usize),
    #[error("confidence {0} outside (0, 1)")]
    Confidence(f64),
    #[error("benchmark column '{0}' not found")]
    MissingBenchmark(String),
    #[error("metric '{metric}' has treatments {found:?}, expected {expected:?}")]
    TreatmentMismatch { metric: String, expected: Vec<String>, found: Vec<String> },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: String, source: csv::Error },
    #[error("{path}, row {row}: cannot parse '{value}'")]
    Parse { path: String, row: usize, value: String },
}

/// One metric observed over `blocks` runs for each of several treatments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMatrix {
    /// `values[block][treatment]`.
    pub values: Vec<Vec<f64>>,
    pub treatment_names: Vec<String>,
    pub higher_is_better: bool,
}

impl RunMatrix {
    pub fn new(
        values: Vec<Vec<f64>>,
        treatment_names: Vec<String>,
        higher_is_better: bool,
    ) -> Result<Self, StatsError> {
        let k = treatment_names.len();
        if k < 2 || values.len() < 2 {
            return Err(StatsError::TooSmall { treatments: k, blocks: values.len() });
        }
        for (row, block) in values.iter().enumerate() {
            if block.len() != k {
                return Err(StatsError::Ragged { row, expected: k, found: block.len() });
            }
            if let Some(column) = block.iter().position(|v| !v.is_finite()) {
                return Err(StatsError::NonFinite { row, column });
            }
        }
        Ok(Self { values, treatment_names, higher_is_better })
    }

    pub fn n_blocks(&self) -> usize {
        self.values.len()
    }

    pub fn n_treatments(&self) -> usize {
        self.treatment_names.len()
    }

    pub fn column(&self, t: usize) -> Vec<f64> {
        self.values.iter().map(|b| b[t]).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.treatment_names.iter().position(|n| n == name)
    }

    /// Reads a CSV whose header names the treatments and whose rows are runs.
    pub fn read_csv(path: &Path, higher_is_better: bool) -> Result<Self, StatsError> {
        let shown = path.display().to_string();
        let mut reader = csv::Reader::from_path(path).map_err(|source| StatsError::Csv {
            path: shown.clone(),
            source,
        })?;
        let names: Vec<String> = reader
            .headers()
            .map_err(|source| StatsError::Csv { path: shown.clone(), source })?
            .iter()
            .map(|h| h.trim().to_string())
            .collect();
        let mut values = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|source| StatsError::Csv { path: shown.clone(), source })?;
            let row = record
                .iter()
                .map(|cell| {
                    cell.trim().parse::<f64>().map_err(|_| StatsError::Parse {
                        path: shown.clone(),
                        row: i + 1,
                        value: cell.to_string(),
                    })
                })
                .collect::<Result<Vec<f64>, _>>()?;
            values.push(row);
        }
        Self::new(values, names, higher_is_better)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let names = vec!["a".to_string(), "b".to_string()];
        assert!(RunMatrix::new(vec![vec![1.0, 2.0]], names.clone(), true).is_err());
        assert!(matches!(
            RunMatrix::new(vec![vec![1.0, 2.0], vec![1.0]], names.clone(), true),
            Err(StatsError::Ragged { row: 1, .. })
        ));
        assert!(matches!(
            RunMatrix::new(vec![vec![1.0, 2.0], vec![f64::NAN, 1.0]], names.clone(), true),
            Err(StatsError::NonFinite { row: 1, column: 0 })
        ));
        let m = RunMatrix::new(vec![vec![1.0, 2.0], vec![3.0, 4.0]], names, true).unwrap();
        assert_eq!(m.column(1), vec![2.0, 4.0]);
        assert_eq!(m.index_of("b"), Some(1));
    }

    #[test]
    fn reads_csv() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("auc.csv");
        std::fs::write(&path, "All,E_1:2\n0.9,0.95\n0.8,0.85\n").unwrap();
        let m = RunMatrix::read_csv(&path, true).unwrap();
        assert_eq!(m.treatment_names, vec!["All", "E_1:2"]);
        assert_eq!(m.values, vec![vec![0.9, 0.95], vec![0.8, 0.85]]);
        std::fs::write(&path, "a,b\n1,x\n2,3\n").unwrap();
        assert!(matches!(RunMatrix::read_csv(&path, true), Err(StatsError::Parse { row: 1, .. })));
    }
}
