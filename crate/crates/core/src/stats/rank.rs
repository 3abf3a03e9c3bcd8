use serde::{Deserialize, Serialize};

use super::special::{chi2_sf, t_two_sided};
use super::RunMatrix;

/// 1-based ranks with ties sharing the mean of the ranks they span.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // positions i..j hold ranks i+1..=j
        let r = (i + 1 + j) as f64 / 2.0;
        for &o in &order[i..j] {
            ranks[o] = r;
        }
        i = j;
    }
    ranks
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FriedmanResult {
    pub statistic: f64,
    pub df: usize,
    pub p: f64,
    /// Per-treatment sums of within-block ranks (ascending values).
    pub rank_sums: Vec<f64>,
    /// Sum of squared within-block ranks, used by the post-hoc test.
    #[serde(skip)]
    pub(crate) rank_square_sum: f64,
}

impl FriedmanResult {
    pub fn mean_ranks(&self, n_blocks: usize) -> Vec<f64> {
        self.rank_sums.iter().map(|r| r / n_blocks as f64).collect()
    }
}

/// Friedman's rank test with the tie-corrected statistic.
pub fn friedman(m: &RunMatrix) -> FriedmanResult {
    let n = m.n_blocks() as f64;
    let k = m.n_treatments();
    let kf = k as f64;
    let mut rank_sums = vec![0.0; k];
    let mut rank_square_sum = 0.0;
    let mut tie_sum = 0.0;
    for block in &m.values {
        let ranks = midranks(block);
        for (sum, r) in rank_sums.iter_mut().zip(&ranks) {
            *sum += r;
            rank_square_sum += r * r;
        }
        tie_sum += tie_term(block);
    }
    let ss: f64 = rank_sums.iter().map(|r| r * r).sum();
    let correction = 1.0 - tie_sum / (n * kf * (kf * kf - 1.0));
    let statistic = if correction <= 0.0 {
        0.0
    } else {
        ((12.0 / (n * kf * (kf + 1.0))) * ss - 3.0 * n * (kf + 1.0)).max(0.0) / correction
    };
    FriedmanResult {
        statistic,
        df: k - 1,
        p: chi2_sf(statistic, (k - 1) as f64),
        rank_sums,
        rank_square_sum,
    }
}

/// `sum(t^3 - t)` over the tie groups of one block.
fn tie_term(block: &[f64]) -> f64 {
    let mut sorted = block.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut total = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        total += t * t * t - t;
        i = j;
    }
    total
}

/// Conover's all-pairs post-hoc test for the Friedman design.
///
/// For treatments `i, j` with rank sums `R_i, R_j`:
///
/// ```text
/// t = |R_i - R_j| / sqrt(2 (n A - sum_j R_j^2) / ((n - 1)(k - 1)))
/// ```
///
/// where `A` is the sum of all squared within-block ranks, with a two-sided
/// p-value from Student's t on `(n - 1)(k - 1)` degrees of freedom. When
/// the denominator vanishes (identical rankings in every block) the p-value
/// is 0 for differing rank sums and 1 otherwise.
pub fn conover_posthoc(m: &RunMatrix, fr: &FriedmanResult) -> Vec<Vec<f64>> {
    let n = m.n_blocks() as f64;
    let k = m.n_treatments();
    let ss: f64 = fr.rank_sums.iter().map(|r| r * r).sum();
    let df = (n - 1.0) * (k as f64 - 1.0);
    let var = 2.0 * (n * fr.rank_square_sum - ss) / df;
    let mut p = vec![vec![1.0; k]; k];
    for i in 0..k {
        for j in (i + 1)..k {
            let diff = (fr.rank_sums[i] - fr.rank_sums[j]).abs();
            let pij = if var <= 0.0 {
                if diff > 0.0 {
                    0.0
                } else {
                    1.0
                }
            } else {
                t_two_sided(diff / var.sqrt(), df)
            };
            p[i][j] = pij;
            p[j][i] = pij;
        }
    }
    p
}
