use serde::{Deserialize, Serialize};

use super::{SpfpError, ViewSet};
use crate::dataset::CodedMatrix;
use crate::info::RowPartition;

/// Size and overlap summary of a view set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewStats {
    pub sizes: Vec<usize>,
    pub union_size: usize,
    pub intersection_size: usize,
    pub ratios: Vec<f64>,
    pub union_ratio: f64,
    pub mean_size: f64,
    pub std_size: f64,
    /// `overlap[a][b] = |view_a ∩ view_b|`; the diagonal holds view sizes.
    pub overlap: Vec<Vec<usize>>,
    #[serde(skip)]
    pub elapsed: Vec<f64>,
}

impl ViewStats {
    /// Off-diagonal overlaps in `(0,1), (0,2), ..., (1,2), ...` order.
    pub fn pairwise(&self) -> Vec<usize> {
        let k = self.sizes.len();
        (0..k)
            .flat_map(|a| ((a + 1)..k).map(move |b| (a, b)))
            .map(|(a, b)| self.overlap[a][b])
            .collect()
    }
}

pub fn view_stats(vs: &ViewSet, n_features: usize) -> ViewStats {
    let sets: Vec<Vec<usize>> = vs
        .views
        .iter()
        .map(|v| {
            let mut f = v.feature_ids.clone();
            f.sort_unstable();
            f
        })
        .collect();
    let sizes: Vec<usize> = sets.iter().map(Vec::len).collect();
    let mut union: Vec<usize> = sets.iter().flatten().copied().collect();
    union.sort_unstable();
    union.dedup();
    let intersection_size = union
        .iter()
        .filter(|f| sets.iter().all(|s| s.binary_search(f).is_ok()))
        .count();
    let overlap = sets
        .iter()
        .map(|a| {
            sets.iter()
                .map(|b| a.iter().filter(|f| b.binary_search(f).is_ok()).count())
                .collect()
        })
        .collect();
    let nf = n_features.max(1) as f64;
    let k = sizes.len().max(1) as f64;
    let mean_size = sizes.iter().sum::<usize>() as f64 / k;
    let var = sizes.iter().map(|&s| (s as f64 - mean_size).powi(2)).sum::<f64>() / k;
    ViewStats {
        ratios: sizes.iter().map(|&s| s as f64 / nf).collect(),
        union_ratio: union.len() as f64 / nf,
        union_size: union.len(),
        intersection_size,
        mean_size,
        std_size: var.sqrt(),
        sizes,
        overlap,
        elapsed: vs.elapsed(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCmi {
    pub a: usize,
    pub b: usize,
    pub cmi: f64,
}

/// Conditional dependence between views given the target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndependenceReport {
    /// `cmi[a][b] = I(view_a; view_b | Y)`; the diagonal is `H(view_a | Y)`.
    pub cmi: Vec<Vec<f64>>,
    pub pairs: Vec<PairCmi>,
    pub h_f: f64,
    pub h_y: f64,
    /// Necessary condition for pairwise conditional independence of views
    /// that each carry the full joint information with the target.
    pub h_f_le_h_y: bool,
    pub tolerance: f64,
    /// True when some distinct pair has CMI above `tolerance`.
    pub independence_violated: bool,
}

pub fn conditional_independence_report(
    vs: &ViewSet,
    coded: &CodedMatrix,
    target: &[u32],
    tolerance: f64,
) -> Result<IndependenceReport, SpfpError> {
    let k = vs.views.len();
    if k < 2 {
        return Err(SpfpError::TooFewViews(k));
    }
    let n = target.len();
    let py = RowPartition::from_column(target);
    let h_y = py.entropy();
    let partitions: Vec<RowPartition> = vs
        .views
        .iter()
        .map(|v| {
            let cols: Vec<&[u32]> = v.feature_ids.iter().map(|&f| coded.column(f)).collect();
            RowPartition::from_columns(n, &cols).expect("rectangular matrix")
        })
        .collect();
    let with_y: Vec<RowPartition> = partitions
        .iter()
        .map(|p| p.refine(target).expect("lengths match"))
        .collect();

    let mut cmi = vec![vec![0.0; k]; k];
    let mut pairs = Vec::new();
    for a in 0..k {
        for b in a..k {
            let joint = with_y[a]
                .refine(partitions[b].group_ids())
                .expect("lengths match");
            let v = (with_y[a].entropy() + with_y[b].entropy() - joint.entropy() - h_y).max(0.0);
            cmi[a][b] = v;
            cmi[b][a] = v;
            if a != b {
                pairs.push(PairCmi { a, b, cmi: v });
            }
        }
    }
    let h_f = RowPartition::from_columns(n, &coded.codes)
        .expect("rectangular matrix")
        .entropy();
    Ok(IndependenceReport {
        independence_violated: pairs.iter().any(|p| p.cmi > tolerance),
        cmi,
        pairs,
        h_f,
        h_y,
        h_f_le_h_y: h_f <= h_y + 1e-9,
        tolerance,
    })
}
