use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::StatsError;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Magnitude {
    Negligible,
    Small,
    Medium,
    Large,
}

impl Magnitude {
    pub fn of(delta: f64) -> Self {
        let d = delta.abs();
        if d < 0.147 {
            Self::Negligible
        } else if d < 0.333 {
            Self::Small
        } else if d < 0.474 {
            Self::Medium
        } else {
            Self::Large
        }
    }
}

/// Cliff's delta: `P(a > b) - P(a < b)` over all cross pairs.
pub fn cliffs_delta(a: &[f64], b: &[f64]) -> Result<(f64, Magnitude), StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let mut sorted = b.to_vec();
    sorted.sort_by(f64::total_cmp);
    let d = dominance(a, &sorted);
    Ok((d, Magnitude::of(d)))
}

fn dominance(a: &[f64], sorted_b: &[f64]) -> f64 {
    let nb = sorted_b.len() as i64;
    let mut net = 0i64;
    for &x in a {
        let below = sorted_b.partition_point(|&y| y < x) as i64;
        let not_above = sorted_b.partition_point(|&y| y <= x) as i64;
        net += below - (nb - not_above);
    }
    net as f64 / (a.len() as f64 * sorted_b.len() as f64)
}

/// Percentile bootstrap interval for Cliff's delta. `a` and `b` are
/// resampled independently; replicate `i` draws from its own substream.
pub fn bootstrap_ci(
    a: &[f64],
    b: &[f64],
    replicates: usize,
    confidence: f64,
    seed: u64,
) -> Result<(f64, f64), StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::EmptySample);
    }
    if replicates < 100 {
        return Err(StatsError::TooFewReplicates(replicates));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(StatsError::Confidence(confidence));
    }
    let mut deltas: Vec<f64> = (0..replicates)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::substream(seed, rng::BOOTSTRAP + i as u64);
            let ra: Vec<f64> = (0..a.len()).map(|_| a[r.random_range(0..a.len())]).collect();
            let mut rb: Vec<f64> = (0..b.len()).map(|_| b[r.random_range(0..b.len())]).collect();
            rb.sort_by(f64::total_cmp);
            dominance(&ra, &rb)
        })
        .collect();
    deltas.sort_by(f64::total_cmp);
    let tail = (1.0 - confidence) / 2.0;
    Ok((quantile(&deltas, tail), quantile(&deltas, 1.0 - tail)))
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}
