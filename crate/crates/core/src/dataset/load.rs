use std::fs::File;
use std::path::Path;

use log::{info, warn};
use serde::{Deserialize, Serialize};

use super::{Dataset, DatasetError};

/// What to do with rows that contain missing cells.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MissingPolicy {
    /// Fail, naming the first offending row and column.
    #[default]
    Reject,
    /// Drop rows containing any missing cell.
    DropRows,
    /// Replace missing feature cells with the column median. Rows with a
    /// missing target are still dropped.
    Median,
}

impl std::str::FromStr for MissingPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "reject" => Ok(Self::Reject),
            "drop_rows" | "drop" => Ok(Self::DropRows),
            "median" => Ok(Self::Median),
            other => Err(format!("unknown missing policy '{other}' (reject, drop_rows, median)")),
        }
    }
}

/// Target column selector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TargetColumn {
    Name(String),
    Index(usize),
}

impl TargetColumn {
    /// A header name if one matches, otherwise a zero-based index when the
    /// text is numeric.
    pub fn resolve(&self, headers: &[String]) -> Option<usize> {
        match self {
            TargetColumn::Name(name) => headers
                .iter()
                .position(|h| h == name)
                .or_else(|| name.parse::<usize>().ok().filter(|&i| i < headers.len())),
            TargetColumn::Index(i) => (*i < headers.len()).then_some(*i),
        }
    }
}

impl std::fmt::Display for TargetColumn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TargetColumn::Name(n) => write!(f, "'{n}'"),
            TargetColumn::Index(i) => write!(f, "#{i}"),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    pub missing: MissingPolicy,
}

fn is_missing(cell: &str) -> bool {
    matches!(cell, "" | "NA" | "NaN" | "nan" | "?" | "null")
}

/// Loads a comma-separated file with a header row. Every non-target column
/// must be numeric; the target is label-encoded in order of first appearance.
pub fn load_csv(
    path: impl AsRef<Path>,
    target: &TargetColumn,
    opts: &LoadOptions,
) -> Result<Dataset, DatasetError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    let target_idx = target
        .resolve(&headers)
        .ok_or_else(|| DatasetError::MissingTarget(target.to_string()))?;
    let feature_cols: Vec<usize> = (0..headers.len()).filter(|&j| j != target_idx).collect();
    if feature_cols.is_empty() {
        return Err(DatasetError::NoFeatures);
    }

    let mut columns: Vec<Vec<Option<f64>>> = vec![Vec::new(); feature_cols.len()];
    let mut labels: Vec<String> = Vec::new();
    let mut source_rows = Vec::new();
    let mut dropped = 0usize;

    for (r, record) in reader.records().enumerate() {
        let record = record?;
        let row = r + 1;
        let mut cells = Vec::with_capacity(feature_cols.len());
        let mut missing_at: Option<usize> = None;
        for &j in &feature_cols {
            let raw = record.get(j).unwrap_or("");
            if is_missing(raw) {
                missing_at.get_or_insert(j);
                cells.push(None);
                continue;
            }
            let v: f64 = raw.parse().map_err(|_| DatasetError::BadCell {
                row,
                column: headers[j].clone(),
                reason: format!("cannot parse '{raw}' as a number"),
            })?;
            if !v.is_finite() {
                return Err(DatasetError::BadCell {
                    row,
                    column: headers[j].clone(),
                    reason: format!("non-finite value '{raw}'"),
                });
            }
            cells.push(Some(v));
        }
        let label = record.get(target_idx).unwrap_or("");
        let target_missing = is_missing(label);
        if target_missing {
            missing_at.get_or_insert(target_idx);
        }
        if let Some(j) = missing_at {
            let drop = match opts.missing {
                MissingPolicy::Reject => {
                    return Err(DatasetError::BadCell {
                        row,
                        column: headers[j].clone(),
                        reason: "missing value".into(),
                    })
                }
                MissingPolicy::DropRows => true,
                MissingPolicy::Median => target_missing,
            };
            if drop {
                dropped += 1;
                continue;
            }
        }
        for (col, cell) in columns.iter_mut().zip(cells) {
            col.push(cell);
        }
        labels.push(label.to_owned());
        source_rows.push(r);
    }
    if dropped > 0 {
        warn!("dropped {dropped} row(s) with missing values");
    }

    let mut imputed = 0usize;
    let features: Vec<Vec<f64>> = columns
        .into_iter()
        .map(|col| {
            let mut present: Vec<f64> = col.iter().flatten().copied().collect();
            present.sort_by(f64::total_cmp);
            let median = median_sorted(&present);
            col.into_iter()
                .map(|c| {
                    c.unwrap_or_else(|| {
                        imputed += 1;
                        median
                    })
                })
                .collect()
        })
        .collect();
    if imputed > 0 {
        info!("imputed {imputed} missing cell(s) with column medians");
    }

    let mut class_names: Vec<String> = Vec::new();
    let target_codes: Vec<u32> = labels
        .iter()
        .map(|l| match class_names.iter().position(|c| c == l) {
            Some(k) => k as u32,
            None => {
                class_names.push(l.clone());
                (class_names.len() - 1) as u32
            }
        })
        .collect();
    if target_codes.is_empty() {
        return Err(DatasetError::Empty);
    }
    if class_names.len() < 2 {
        return Err(DatasetError::TooFewClasses);
    }
    let mut ds = Dataset::new(
        features,
        feature_cols.iter().map(|&j| headers[j].clone()).collect(),
        target_codes,
        class_names,
    )?;
    ds.dropped_rows = dropped;
    ds.source_rows = source_rows;
    Ok(ds)
}

fn median_sorted(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        n if n % 2 == 1 => v[n / 2],
        n => 0.5 * (v[n / 2 - 1] + v[n / 2]),
    }
}
