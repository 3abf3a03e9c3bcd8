use std::collections::HashMap;
use std::path::Path;

use super::metrics::ROW_SUM_TOLERANCE;
use super::EnsembleError;

/// Probability rows read from a `row_id,class_0,...,class_{C-1}` CSV, keyed
/// by row id.
#[derive(Debug, Clone, PartialEq)]
pub struct ImportedProba {
    pub path: String,
    pub rows: HashMap<usize, Vec<f64>>,
}

impl ImportedProba {
    /// Rows in the order of `row_ids`, failing on any id the file lacks.
    pub fn align(&self, row_ids: &[usize]) -> Result<Vec<Vec<f64>>, EnsembleError> {
        row_ids
            .iter()
            .map(|id| {
                self.rows.get(id).cloned().ok_or_else(|| EnsembleError::BadProbabilities {
                    path: self.path.clone(),
                    row: *id,
                    reason: "row id missing".into(),
                })
            })
            .collect()
    }
}

pub fn read_proba_csv(path: &Path, n_classes: usize) -> Result<ImportedProba, EnsembleError> {
    let shown = path.display().to_string();
    let bad = |row: usize, reason: String| EnsembleError::BadProbabilities {
        path: shown.clone(),
        row,
        reason,
    };
    let mut reader = csv::Reader::from_path(path).map_err(|source| EnsembleError::Csv {
        path: shown.clone(),
        source,
    })?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|source| EnsembleError::Csv { path: shown.clone(), source })?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let expected: Vec<String> = std::iter::once("row_id".to_string())
        .chain((0..n_classes).map(|c| format!("class_{c}")))
        .collect();
    if header != expected {
        if header.len() != expected.len() {
            return Err(EnsembleError::ClassMismatch {
                expected: n_classes,
                found: header.len().saturating_sub(1),
            });
        }
        return Err(bad(0, format!("header {header:?}, expected {expected:?}")));
    }

    let mut rows = HashMap::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 1;
        let record = record.map_err(|source| EnsembleError::Csv { path: shown.clone(), source })?;
        let id: usize = record[0]
            .trim()
            .parse()
            .map_err(|_| bad(line, format!("bad row id '{}'", &record[0])))?;
        let p = record
            .iter()
            .skip(1)
            .map(|cell| cell.trim().parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| bad(line, e.to_string()))?;
        if p.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(bad(line, "probability outside [0, 1]".into()));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
            return Err(bad(line, format!("probabilities sum to {sum}")));
        }
        if rows.insert(id, p).is_some() {
            return Err(bad(line, format!("duplicate row id {id}")));
        }
    }
    Ok(ImportedProba { path: shown, rows })
}
