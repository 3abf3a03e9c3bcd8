use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::{
    adjust, bootstrap_ci, cliffs_delta, conover_posthoc, friedman, Adjustment, FriedmanResult,
    Magnitude, RunMatrix, StatsError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Win,
    Tie,
    Loss,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonVerdict {
    pub outcome: Outcome,
    /// Oriented so that positive means the model beats the benchmark.
    pub delta: f64,
    pub magnitude: Magnitude,
    pub ci: (f64, f64),
    pub p_friedman_adj: f64,
    pub p_conover_adj: f64,
}

/// One metric's run matrix. Metrics with `in_family` set share a
/// Bonferroni family for the Friedman p-values.
#[derive(Debug, Clone)]
pub struct MetricInput {
    pub name: String,
    pub matrix: RunMatrix,
    pub in_family: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictOptions {
    pub benchmark: String,
    pub alpha: f64,
    pub replicates: usize,
    pub confidence: f64,
    pub seed: u64,
}

impl Default for VerdictOptions {
    fn default() -> Self {
        Self {
            benchmark: "All".into(),
            alpha: 0.05,
            replicates: 10_000,
            confidence: 0.95,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricVerdicts {
    pub higher_is_better: bool,
    pub friedman: FriedmanResult,
    pub p_friedman_adj: f64,
    /// Benjamini-Hochberg adjusted Conover p-values, all pairs.
    pub conover_p_adj: Vec<Vec<f64>>,
    /// Keyed by model name; the benchmark itself is absent.
    pub verdicts: IndexMap<String, ComparisonVerdict>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WtlCounts {
    pub win: usize,
    pub tie: usize,
    pub loss: usize,
}

impl WtlCounts {
    pub fn add(&mut self, o: Outcome) {
        match o {
            Outcome::Win => self.win += 1,
            Outcome::Tie => self.tie += 1,
            Outcome::Loss => self.loss += 1,
        }
    }
}

impl std::fmt::Display for WtlCounts {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} - {} - {}", self.win, self.tie, self.loss)
    }
}

/// Compares every model against the benchmark on every metric.
///
/// A model wins when the adjusted Friedman p and the adjusted Conover p
/// against the benchmark are both below `alpha` and Cliff's delta is
/// positive, loses under the same significance with negative delta, and
/// ties otherwise.
pub fn win_tie_loss(
    metrics: &[MetricInput],
    opts: &VerdictOptions,
) -> Result<IndexMap<String, MetricVerdicts>, StatsError> {
    let results: Vec<FriedmanResult> = metrics.iter().map(|m| friedman(&m.matrix)).collect();
    let family: Vec<usize> = (0..metrics.len()).filter(|&i| metrics[i].in_family).collect();
    let family_p: Vec<f64> = family.iter().map(|&i| results[i].p).collect();
    let family_adj = adjust(&family_p, Adjustment::Bonferroni)?;
    let mut p_adj: Vec<f64> = results.iter().map(|r| r.p).collect();
    for (&i, &p) in family.iter().zip(&family_adj) {
        p_adj[i] = p;
    }

    let mut out = IndexMap::new();
    for ((input, fr), p_fr) in metrics.iter().zip(results).zip(p_adj) {
        let m = &input.matrix;
        let bench = m
            .index_of(&opts.benchmark)
            .ok_or_else(|| StatsError::MissingBenchmark(opts.benchmark.clone()))?;
        let k = m.n_treatments();
        let raw = conover_posthoc(m, &fr);
        let pairs: Vec<(usize, usize)> =
            (0..k).flat_map(|i| ((i + 1)..k).map(move |j| (i, j))).collect();
        let flat: Vec<f64> = pairs.iter().map(|&(i, j)| raw[i][j].clamp(0.0, 1.0)).collect();
        let mut conover_p_adj = vec![vec![1.0; k]; k];
        for (&(i, j), p) in pairs.iter().zip(adjust(&flat, Adjustment::BenjaminiHochberg)?) {
            conover_p_adj[i][j] = p;
            conover_p_adj[j][i] = p;
        }

        let sign = if m.higher_is_better { 1.0 } else { -1.0 };
        let oriented = |t: usize| -> Vec<f64> { m.column(t).into_iter().map(|v| sign * v).collect() };
        let b = oriented(bench);
        let mut verdicts = IndexMap::new();
        for t in (0..k).filter(|&t| t != bench) {
            let a = oriented(t);
            let (delta, magnitude) = cliffs_delta(&a, &b)?;
            let ci = bootstrap_ci(&a, &b, opts.replicates, opts.confidence, opts.seed)?;
            let p_cn = conover_p_adj[t][bench];
            let significant = p_fr < opts.alpha && p_cn < opts.alpha;
            let outcome = match (significant, delta) {
                (true, d) if d > 0.0 => Outcome::Win,
                (true, d) if d < 0.0 => Outcome::Loss,
                _ => Outcome::Tie,
            };
            verdicts.insert(
                m.treatment_names[t].clone(),
                ComparisonVerdict {
                    outcome,
                    delta,
                    magnitude,
                    ci,
                    p_friedman_adj: p_fr,
                    p_conover_adj: p_cn,
                },
            );
        }
        out.insert(
            input.name.clone(),
            MetricVerdicts {
                higher_is_better: m.higher_is_better,
                friedman: fr,
                p_friedman_adj: p_fr,
                conover_p_adj,
                verdicts,
            },
        );
    }
    Ok(out)
}
