//! Plug-in (maximum-likelihood) information estimators over coded columns.
//!
//! Everything is measured in bits. Mutual and conditional mutual information
//! are clamped at zero; interaction gain keeps its sign.

mod cache;
mod partition;

pub use cache::{PairCache, PairInfo};
pub use partition::RowPartition;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InfoError {
    #[error("empty input")]
    Empty,
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
}

/// Entropy of a count histogram over `total` observations. Zero counts are
/// skipped. Counts are summed in sorted order so the result does not depend
/// on how the histogram was enumerated.
pub fn entropy_of_counts(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let mut sorted: Vec<usize> = counts.iter().copied().filter(|&c| c > 0).collect();
    sorted.sort_unstable();
    let n = total as f64;
    sorted
        .into_iter()
        .map(|c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum::<f64>()
        .max(0.0)
}

fn check_len(expected: usize, col: &[u32]) -> Result<(), InfoError> {
    if col.len() != expected {
        return Err(InfoError::LengthMismatch {
            expected,
            found: col.len(),
        });
    }
    Ok(())
}

/// `H(X)`.
pub fn entropy(column: &[u32]) -> Result<f64, InfoError> {
    if column.is_empty() {
        return Err(InfoError::Empty);
    }
    Ok(RowPartition::from_column(column).entropy())
}

/// `H(X1, ..., Xk)`: entropy of the row tuples.
pub fn joint_entropy(columns: &[&[u32]]) -> Result<f64, InfoError> {
    let first = columns.first().ok_or(InfoError::Empty)?;
    if first.is_empty() {
        return Err(InfoError::Empty);
    }
    Ok(RowPartition::from_columns(first.len(), columns)?.entropy())
}

/// `H(X|Y) = H(X,Y) - H(Y)`.
pub fn conditional_entropy(x: &[u32], given: &[u32]) -> Result<f64, InfoError> {
    check_len(x.len(), given)?;
    let hxy = joint_entropy(&[x, given])?;
    let hy = entropy(given)?;
    Ok((hxy - hy).max(0.0))
}

/// `I(X;Y) = H(X) + H(Y) - H(X,Y)`.
pub fn mutual_information(x: &[u32], y: &[u32]) -> Result<f64, InfoError> {
    check_len(x.len(), y)?;
    let hx = entropy(x)?;
    let hy = entropy(y)?;
    let hxy = joint_entropy(&[x, y])?;
    Ok((hx + hy - hxy).max(0.0))
}

/// `I(X;Y|Z) = H(X,Z) + H(Y,Z) - H(X,Y,Z) - H(Z)`.
pub fn conditional_mutual_information(x: &[u32], y: &[u32], given: &[u32]) -> Result<f64, InfoError> {
    check_len(x.len(), y)?;
    check_len(x.len(), given)?;
    let pz = RowPartition::from_column(given);
    let pxz = pz.refine(x)?;
    let pyz = pz.refine(y)?;
    let pxyz = pxz.refine(y)?;
    Ok(cmi_from_entropies(pxz.entropy(), pyz.entropy(), pxyz.entropy(), pz.entropy()))
}

pub(crate) fn cmi_from_entropies(hxz: f64, hyz: f64, hxyz: f64, hz: f64) -> f64 {
    (hxz + hyz - hxyz - hz).max(0.0)
}

/// Interaction gain `I(X;Y) - I(X;Y|T)`. Negative when conditioning on the
/// target reveals dependence (synergy), positive when it removes it.
pub fn interaction_gain(x: &[u32], y: &[u32], target: &[u32]) -> Result<f64, InfoError> {
    Ok(mutual_information(x, y)? - conditional_mutual_information(x, y, target)?)
}

/// `|r|` for the sample Pearson correlation; 0 when either side is constant.
pub fn pearson_abs(x: &[f64], y: &[f64]) -> Result<f64, InfoError> {
    if x.len() != y.len() {
        return Err(InfoError::LengthMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(InfoError::Empty);
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Ok(0.0);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).abs().min(1.0))
}
