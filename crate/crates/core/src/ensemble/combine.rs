use log::warn;
use serde::{Deserialize, Serialize};

use super::EnsembleError;

/// Members of one ensemble and their normalized weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    /// View indices, a prefix `0..k` of the view order.
    pub members: Vec<usize>,
    pub weights: Vec<f64>,
}

/// Sum of `values` independent of their order.
fn ordered_sum(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    values.iter().sum()
}

/// `auc_g / sum(auc)`. Members with an AUC of exactly 0 get weight 0 and a
/// warning.
pub fn ensemble_weights(aucs: &[f64]) -> Result<Vec<f64>, EnsembleError> {
    if aucs.is_empty() {
        return Err(EnsembleError::NoMembers);
    }
    if let Some(&a) = aucs.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
        return Err(EnsembleError::BadAuc(a));
    }
    for (g, _) in aucs.iter().enumerate().filter(|(_, &a)| a == 0.0) {
        warn!("member {} has AUC 0 and is excluded from the ensemble", g + 1);
    }
    let total = ordered_sum(&mut aucs.to_vec());
    if total == 0.0 {
        return Err(EnsembleError::BadAuc(0.0));
    }
    Ok(aucs.iter().map(|a| a / total).collect())
}

/// AUC-weighted average of the members' probability matrices.
pub fn ensemble_predict(
    members: &[&[Vec<f64>]],
    aucs: &[f64],
) -> Result<Vec<Vec<f64>>, EnsembleError> {
    if members.is_empty() {
        return Err(EnsembleError::NoMembers);
    }
    if members.len() != aucs.len() {
        return Err(EnsembleError::Shape(format!(
            "{} members but {} AUC values",
            members.len(),
            aucs.len()
        )));
    }
    let weights = ensemble_weights(aucs)?;
    let n = members[0].len();
    let c = members[0].first().map_or(0, Vec::len);
    for m in members {
        if m.len() != n {
            return Err(EnsembleError::Shape(format!("{} rows, expected {n}", m.len())));
        }
        if let Some(row) = m.iter().find(|r| r.len() != c) {
            return Err(EnsembleError::ClassMismatch { expected: c, found: row.len() });
        }
    }
    let mut terms = vec![0.0; members.len()];
    Ok((0..n)
        .map(|i| {
            (0..c)
                .map(|k| {
                    for (t, (m, w)) in terms.iter_mut().zip(members.iter().zip(&weights)) {
                        *t = w * m[i][k];
                    }
                    ordered_sum(&mut terms)
                })
                .collect()
        })
        .collect())
}
