use serde::{Deserialize, Serialize};

use super::EnsembleError;
use crate::stats::midranks;

/// Probability rows must sum to 1 within this tolerance.
pub const ROW_SUM_TOLERANCE: f64 = 1e-6;

const CLAMP: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub f1_micro: f64,
    pub auc: f64,
    /// Mean `-log2 p(true class)`.
    pub log_loss: f64,
    /// Mean row entropy (bits) over correctly classified rows.
    pub mec: Option<f64>,
    /// Mean row entropy (bits) over misclassified rows.
    pub mew: Option<f64>,
    /// Seconds spent producing the predictions; kept out of JSON reports.
    #[serde(skip)]
    pub elapsed: f64,
}

/// Shannon entropy of a probability row, in bits.
pub fn row_entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&v| v > 0.0).map(|&v| -v * v.log2()).sum()
}

/// Index of the largest probability; ties go to the lowest class.
pub fn argmax(p: &[f64]) -> usize {
    let mut best = 0;
    for (c, &v) in p.iter().enumerate().skip(1) {
        if v > p[best] {
            best = c;
        }
    }
    best
}

/// Checks that `proba` is a valid `truth.len() x n_classes` matrix.
pub fn validate_proba(proba: &[Vec<f64>], n_classes: usize) -> Result<(), EnsembleError> {
    for (i, row) in proba.iter().enumerate() {
        if row.len() != n_classes {
            return Err(EnsembleError::Shape(format!(
                "row {i} has {} probabilities, expected {n_classes}",
                row.len()
            )));
        }
        if row.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(EnsembleError::Shape(format!("row {i} has a probability outside [0, 1]")));
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
            return Err(EnsembleError::Shape(format!("row {i} sums to {sum}")));
        }
    }
    Ok(())
}

/// Area under the ROC curve of `scores` for the positive rows, via the
/// rank-sum statistic with midranks. `None` without both classes present.
pub fn binary_auc(scores: &[f64], positive: &[bool]) -> Option<f64> {
    let n_pos = positive.iter().filter(|&&p| p).count();
    let n_neg = positive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return None;
    }
    let ranks = midranks(scores);
    let rank_sum: f64 = ranks.iter().zip(positive).filter(|(_, &p)| p).map(|(r, _)| r).sum();
    let n_pos = n_pos as f64;
    Some((rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg as f64))
}

/// One-vs-rest AUC averaged over the classes that occur in `truth` without
/// covering every row.
pub fn macro_auc(proba: &[Vec<f64>], truth: &[u32], n_classes: usize) -> Result<f64, EnsembleError> {
    if n_classes == 2 {
        let scores: Vec<f64> = proba.iter().map(|r| r[1]).collect();
        let positive: Vec<bool> = truth.iter().map(|&t| t == 1).collect();
        return binary_auc(&scores, &positive).ok_or(EnsembleError::UndefinedAuc);
    }
    let aucs: Vec<f64> = (0..n_classes)
        .filter_map(|c| {
            let scores: Vec<f64> = proba.iter().map(|r| r[c]).collect();
            let positive: Vec<bool> = truth.iter().map(|&t| t as usize == c).collect();
            binary_auc(&scores, &positive)
        })
        .collect();
    if aucs.is_empty() {
        return Err(EnsembleError::UndefinedAuc);
    }
    Ok(aucs.iter().sum::<f64>() / aucs.len() as f64)
}

pub fn metrics(proba: &[Vec<f64>], truth: &[u32]) -> Result<MetricReport, EnsembleError> {
    if proba.len() != truth.len() {
        return Err(EnsembleError::Shape(format!(
            "{} probability rows for {} labels",
            proba.len(),
            truth.len()
        )));
    }
    let Some(first) = proba.first() else {
        return Err(EnsembleError::Shape("no rows".into()));
    };
    let c = first.len();
    validate_proba(proba, c)?;
    if let Some(&t) = truth.iter().find(|&&t| t as usize >= c) {
        return Err(EnsembleError::Shape(format!("class code {t} with only {c} classes")));
    }

    let n = truth.len() as f64;
    let mut correct = 0usize;
    let mut h_correct = 0.0;
    let mut h_wrong = 0.0;
    let mut log_loss = 0.0;
    for (row, &t) in proba.iter().zip(truth) {
        let h = row_entropy(row);
        if argmax(row) == t as usize {
            correct += 1;
            h_correct += h;
        } else {
            h_wrong += h;
        }
        log_loss -= row[t as usize].clamp(CLAMP, 1.0 - CLAMP).log2();
    }
    let wrong = truth.len() - correct;
    Ok(MetricReport {
        f1_micro: correct as f64 / n,
        auc: macro_auc(proba, truth, c)?,
        log_loss: log_loss / n,
        mec: (correct > 0).then(|| h_correct / correct as f64),
        mew: (wrong > 0).then(|| h_wrong / wrong as f64),
        elapsed: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_auc(scores: &[f64], positive: &[bool]) -> f64 {
        let mut num = 0.0;
        let mut pairs = 0.0;
        for (i, &pi) in positive.iter().enumerate() {
            for (j, &pj) in positive.iter().enumerate() {
                if pi && !pj {
                    pairs += 1.0;
                    if scores[i] > scores[j] {
                        num += 1.0;
                    } else if scores[i] == scores[j] {
                        num += 0.5;
                    }
                }
            }
        }
        num / pairs
    }

    #[test]
    fn perfect_predictor() {
        let proba = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0]];
        let r = metrics(&proba, &[0, 1, 2, 0]).unwrap();
        assert_eq!(r.f1_micro, 1.0);
        assert_eq!(r.auc, 1.0);
        assert!(r.log_loss < 1e-12);
        assert_eq!(r.mec, Some(0.0));
        assert_eq!(r.mew, None);
    }

    #[test]
    fn uniform_binary() {
        let proba = vec![vec![0.5, 0.5]; 4];
        let r = metrics(&proba, &[0, 1, 0, 1]).unwrap();
        assert!((r.log_loss - 1.0).abs() < 1e-12);
        // argmax ties go to class 0
        assert_eq!(r.f1_micro, 0.5);
        assert_eq!(r.mec, Some(1.0));
        assert_eq!(r.mew, Some(1.0));
        assert_eq!(r.auc, 0.5);
    }

    #[test]
    fn three_row_example() {
        let proba = vec![vec![0.7, 0.3], vec![0.4, 0.6], vec![0.9, 0.1]];
        let r = metrics(&proba, &[0, 1, 1]).unwrap();
        assert!((r.f1_micro - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.mec.unwrap() - 0.9261).abs() < 1e-4);
        assert!((r.mew.unwrap() - 0.4690).abs() < 1e-4);
        // positives score 0.6 and 0.1 against a negative at 0.3
        assert_eq!(r.auc, 0.5);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(metrics(&[vec![0.5, 0.6]], &[0]).is_err());
        assert!(metrics(&[vec![0.5, 0.5]], &[0, 1]).is_err());
        assert!(metrics(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[0, 2]).is_err());
    }

    #[test]
    fn multiclass_skips_absent_classes() {
        let proba = vec![vec![0.6, 0.3, 0.1], vec![0.2, 0.7, 0.1], vec![0.5, 0.4, 0.1]];
        let r = metrics(&proba, &[0, 1, 0]).unwrap();
        // class 0: positives 0.6, 0.5 vs 0.2 -> 1; class 1: 0.7 vs 0.3, 0.4 -> 1
        assert_eq!(r.auc, 1.0);
    }

    proptest! {
        #[test]
        fn auc_matches_pair_counting(
            data in prop::collection::vec((0u8..5, any::<bool>()), 2..=12),
        ) {
            let scores: Vec<f64> = data.iter().map(|(s, _)| f64::from(*s) / 4.0).collect();
            let positive: Vec<bool> = data.iter().map(|(_, p)| *p).collect();
            match binary_auc(&scores, &positive) {
                Some(auc) => prop_assert_eq!(auc, brute_auc(&scores, &positive)),
                None => prop_assert!(positive.iter().all(|&p| p) || positive.iter().all(|&p| !p)),
            }
        }
    }
}
