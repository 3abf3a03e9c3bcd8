use serde::{Deserialize, Serialize};

use super::StatsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Adjustment {
    Bonferroni,
    BenjaminiHochberg,
}

/// Multiplicity-adjusted p-values, in input order.
pub fn adjust(pvals: &[f64], method: Adjustment) -> Result<Vec<f64>, StatsError> {
    if let Some(&bad) = pvals.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(StatsError::PValueRange(bad));
    }
    let m = pvals.len() as f64;
    Ok(match method {
        Adjustment::Bonferroni => pvals.iter().map(|p| (p * m).min(1.0)).collect(),
        Adjustment::BenjaminiHochberg => {
            let mut order: Vec<usize> = (0..pvals.len()).collect();
            order.sort_by(|&a, &b| pvals[a].total_cmp(&pvals[b]));
            let mut out = vec![0.0; pvals.len()];
            let mut running = 1.0f64;
            for (pos, &i) in order.iter().enumerate().rev() {
                // the max guards against p * m / m rounding below p
                running = running.min((pvals[i] * m / (pos + 1) as f64).max(pvals[i]));
                out[i] = running;
            }
            out
        }
    })
}
