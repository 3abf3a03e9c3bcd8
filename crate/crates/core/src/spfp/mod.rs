//! Greedy construction of information-preserving views.
//!
//! Each view is grown one feature at a time by maximizing
//!
//! ```text
//! J(f) = |R(f, Y)| + I(f; Y) - mean_{s in S} I(s; f) + mean_{s in S} I(s; f | Y)
//! ```
//!
//! until the view is large enough and its joint entropy, alone and together
//! with the target, matches that of the full feature set. After every view a
//! fraction of its features is removed from the feature space, so later
//! views are pushed toward other features.

mod config;
mod report;

pub use config::{MinFeatures, RelevanceCorrelation, SpfpConfig};
pub use report::{conditional_independence_report, view_stats, IndependenceReport, PairCmi, ViewStats};

use std::time::Instant;

use log::warn;
use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{discretize, CodedMatrix, Dataset};
use crate::info::{pearson_abs, PairCache, RowPartition};
use crate::rng;

#[derive(Debug, Error)]
pub enum SpfpError {
    #[error("invalid {field}: {reason}")]
    Config { field: &'static str, reason: String },
    #[error("minimum view size {min} exceeds the {available} available features")]
    MinFeaturesTooLarge { min: usize, available: usize },
    #[error("feature {0} out of range")]
    FeatureOutOfRange(usize),
    #[error("feature space exhausted after {} of {requested} views", built.views.len())]
    FeatureSpaceExhausted { built: Box<ViewSet>, requested: usize },
    #[error("need at least two views, got {0}")]
    TooFewViews(usize),
}

/// Scores within this relative distance of the maximum count as tied; ties
/// go to the lowest feature index.
pub const TIE_EPSILON: f64 = 1e-12;

/// Read-only state shared by all views of one run.
pub struct SpfpContext<'a> {
    raw: &'a [Vec<f64>],
    coded: &'a CodedMatrix,
    target: &'a [u32],
    cache: PairCache<'a>,
    correlation: Vec<f64>,
    target_partition: RowPartition,
    h_f: f64,
    h_fy: f64,
}

impl<'a> SpfpContext<'a> {
    /// `raw` and `coded` hold the same columns, before and after
    /// discretization; `target` holds dense class codes.
    pub fn new(
        raw: &'a [Vec<f64>],
        coded: &'a CodedMatrix,
        target: &'a [u32],
        correlation: RelevanceCorrelation,
    ) -> Self {
        assert_eq!(raw.len(), coded.n_columns());
        let n_classes = target.iter().max().map_or(0, |&m| m as usize + 1);
        let codes_f64: Vec<f64> = target.iter().map(|&y| f64::from(y)).collect();
        let indicators: Vec<Vec<f64>> = match correlation {
            RelevanceCorrelation::ClassCode => Vec::new(),
            RelevanceCorrelation::MaxOvr => (0..n_classes as u32)
                .map(|k| target.iter().map(|&y| f64::from(u8::from(y == k))).collect())
                .collect(),
        };
        let correlation: Vec<f64> = raw
            .par_iter()
            .map(|col| match correlation {
                RelevanceCorrelation::ClassCode => pearson_abs(col, &codes_f64).unwrap_or(0.0),
                RelevanceCorrelation::MaxOvr => indicators
                    .iter()
                    .map(|ind| pearson_abs(col, ind).unwrap_or(0.0))
                    .fold(0.0, f64::max),
            })
            .collect();
        let full = RowPartition::from_columns(target.len(), &coded.codes).expect("rectangular matrix");
        let target_partition = RowPartition::from_column(target);
        let h_fy = full.refine(target).expect("lengths match").entropy();
        Self {
            raw,
            coded,
            target,
            cache: PairCache::new(coded, target),
            correlation,
            target_partition,
            h_f: full.entropy(),
            h_fy,
        }
    }

    pub fn n_features(&self) -> usize {
        self.coded.n_columns()
    }

    /// `H(F)` over all features.
    pub fn h_f(&self) -> f64 {
        self.h_f
    }

    /// `H(F, Y)`.
    pub fn h_fy(&self) -> f64 {
        self.h_fy
    }

    pub fn cache(&self) -> &PairCache<'a> {
        &self.cache
    }

    pub fn coded(&self) -> &'a CodedMatrix {
        self.coded
    }

    pub fn raw(&self) -> &'a [Vec<f64>] {
        self.raw
    }

    pub fn target(&self) -> &'a [u32] {
        self.target
    }

    /// `|R(f_j, Y)|` as configured.
    pub fn correlation(&self, j: usize) -> f64 {
        self.correlation[j]
    }
}

/// Objective value of adding `candidate` to `selected`. With nothing
/// selected the redundancy and complementarity averages are zero.
pub fn score_candidate(ctx: &SpfpContext<'_>, candidate: usize, selected: &[usize]) -> Result<f64, SpfpError> {
    if candidate >= ctx.n_features() {
        return Err(SpfpError::FeatureOutOfRange(candidate));
    }
    if let Some(&bad) = selected.iter().find(|&&s| s >= ctx.n_features()) {
        return Err(SpfpError::FeatureOutOfRange(bad));
    }
    let relevance = ctx.correlation[candidate] + ctx.cache.relevance(candidate);
    if selected.is_empty() {
        return Ok(relevance);
    }
    let (mut redundancy, mut complementarity) = (0.0, 0.0);
    for &s in selected {
        let p = ctx.cache.get(s, candidate);
        redundancy += p.mi;
        complementarity += p.cmi;
    }
    let k = selected.len() as f64;
    Ok(relevance - redundancy / k + complementarity / k)
}

/// Status of the three stopping criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Criteria {
    /// `|S| >= N_F`.
    pub size: bool,
    /// `H(S)` matches `H(F)`.
    pub entropy: bool,
    /// `H(S, Y)` matches `H(F, Y)`.
    pub joint_entropy: bool,
}

impl Criteria {
    pub fn all(&self) -> bool {
        self.size && self.entropy && self.joint_entropy
    }
}

/// Evaluates the stopping criteria. Entropy equality is tested as
/// `H(S) >= H(F) * (1 - tol)`, which suffices because no subset exceeds the
/// full set.
pub fn criteria_met(n_selected: usize, h_s: f64, h_sy: f64, h_f: f64, h_fy: f64, n_f: usize, tol: f64) -> Criteria {
    Criteria {
        size: n_selected >= n_f,
        entropy: h_s >= h_f * (1.0 - tol),
        joint_entropy: h_sy >= h_fy * (1.0 - tol),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    CriteriaMet,
    PoolExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub candidates: usize,
    pub winner: usize,
    pub score: f64,
    pub h_s: f64,
    pub h_sy: f64,
    pub criteria: Criteria,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct View {
    /// Selected columns in selection order.
    pub feature_ids: Vec<usize>,
    /// Objective value of each selected feature at the step it won.
    pub scores: Vec<f64>,
    pub h_s: f64,
    pub h_sy: f64,
    pub termination: Termination,
    pub steps: Vec<StepRecord>,
    /// Wall time in seconds; not serialized so outputs stay reproducible.
    #[serde(skip)]
    pub elapsed: f64,
}

impl PartialEq for View {
    /// Compares everything except `elapsed`.
    fn eq(&self, other: &Self) -> bool {
        self.feature_ids == other.feature_ids
            && self.scores == other.scores
            && self.h_s == other.h_s
            && self.h_sy == other.h_sy
            && self.termination == other.termination
            && self.steps == other.steps
    }
}

/// Grows one view from `pool` until all criteria hold or the pool runs dry.
pub fn build_view(ctx: &SpfpContext<'_>, pool: &[usize], n_f: usize, tol: f64) -> View {
    let start = Instant::now();
    let n = ctx.target.len();
    let mut available: Vec<usize> = pool.to_vec();
    available.sort_unstable();
    available.dedup();

    let mut selected: Vec<usize> = Vec::new();
    let mut scores = Vec::new();
    let mut steps = Vec::new();
    let mut p_s = RowPartition::trivial(n);
    let mut p_sy = ctx.target_partition.clone();
    let (mut h_s, mut h_sy) = (p_s.entropy(), p_sy.entropy());
    let mut status = criteria_met(0, h_s, h_sy, ctx.h_f, ctx.h_fy, n_f, tol);

    while !status.all() && !available.is_empty() {
        if let Some(&last) = selected.last() {
            ctx.cache.row(last);
        }
        let scored: Vec<f64> = available
            .par_iter()
            .map(|&c| score_candidate(ctx, c, &selected).expect("pool holds valid features"))
            .collect();
        let (pos, score) = argmax_lowest_index(&scored);
        let winner = available.remove(pos);

        selected.push(winner);
        scores.push(score);
        let column = ctx.coded.column(winner);
        p_s = p_s.refine(column).expect("lengths match");
        p_sy = p_sy.refine(column).expect("lengths match");
        h_s = p_s.entropy();
        h_sy = p_sy.entropy();
        status = criteria_met(selected.len(), h_s, h_sy, ctx.h_f, ctx.h_fy, n_f, tol);
        steps.push(StepRecord {
            candidates: scored.len(),
            winner,
            score,
            h_s,
            h_sy,
            criteria: status,
        });
    }

    View {
        feature_ids: selected,
        scores,
        h_s,
        h_sy,
        termination: if status.all() {
            Termination::CriteriaMet
        } else {
            Termination::PoolExhausted
        },
        steps,
        elapsed: start.elapsed().as_secs_f64(),
    }
}

/// Position of the maximum; near-ties (within [`TIE_EPSILON`], relative)
/// resolve to the earliest position. Scores are indexed by ascending
/// feature id, so the earliest position is the lowest id.
fn argmax_lowest_index(scores: &[f64]) -> (usize, f64) {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let cut = max - TIE_EPSILON * max.abs().max(1.0);
    let pos = scores.iter().position(|&s| s >= cut).expect("non-empty scores");
    (pos, scores[pos])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewSet {
    pub views: Vec<View>,
    pub n_features: usize,
    pub min_features: usize,
    pub h_f: f64,
    pub h_fy: f64,
    /// Sorted union of all view features.
    pub union: Vec<usize>,
    /// Sorted intersection of all view features.
    pub intersection: Vec<usize>,
    /// Features removed from the feature space after each view.
    pub removed_log: Vec<Vec<usize>>,
}

impl ViewSet {
    pub fn union_size(&self) -> usize {
        self.union.len()
    }

    pub fn intersection_size(&self) -> usize {
        self.intersection.len()
    }

    /// `|view| / |F|` per view.
    pub fn ratios(&self) -> Vec<f64> {
        self.views
            .iter()
            .map(|v| v.feature_ids.len() as f64 / self.n_features as f64)
            .collect()
    }

    pub fn elapsed(&self) -> Vec<f64> {
        self.views.iter().map(|v| v.elapsed).collect()
    }

    fn assemble(views: Vec<View>, removed_log: Vec<Vec<usize>>, ctx: &SpfpContext<'_>, min_features: usize) -> Self {
        let mut union: Vec<usize> = views.iter().flat_map(|v| v.feature_ids.iter().copied()).collect();
        union.sort_unstable();
        union.dedup();
        let intersection = union
            .iter()
            .copied()
            .filter(|f| views.iter().all(|v| v.feature_ids.contains(f)))
            .collect();
        Self {
            views,
            n_features: ctx.n_features(),
            min_features,
            h_f: ctx.h_f,
            h_fy: ctx.h_fy,
            union,
            intersection,
            removed_log,
        }
    }
}

/// Builds `config.n_views` views over a prepared context.
///
/// After view `g`, `round(r * |view|)` of its features (sampled uniformly
/// without replacement from stream `VIEW_REMOVAL + g`) leave the feature
/// space. A view whose pool runs dry before the criteria hold is kept with
/// [`Termination::PoolExhausted`]. An empty feature space before the last
/// view is an error carrying the views built so far.
pub fn partition_with_context(ctx: &SpfpContext<'_>, config: &SpfpConfig) -> Result<ViewSet, SpfpError> {
    config.validate()?;
    let n_features = ctx.n_features();
    let n_f = config.min_features.resolve(n_features);
    if n_f > n_features {
        return Err(SpfpError::MinFeaturesTooLarge {
            min: n_f,
            available: n_features,
        });
    }

    let mut space: Vec<usize> = (0..n_features).collect();
    let mut views = Vec::with_capacity(config.n_views);
    let mut removed_log = Vec::with_capacity(config.n_views);
    for g in 0..config.n_views {
        if space.is_empty() {
            return Err(SpfpError::FeatureSpaceExhausted {
                built: Box::new(ViewSet::assemble(views, removed_log, ctx, n_f)),
                requested: config.n_views,
            });
        }
        let view = build_view(ctx, &space, n_f, config.entropy_tolerance);
        if view.termination == Termination::PoolExhausted {
            warn!(
                "view {} exhausted its pool of {} features before meeting the stopping criteria",
                g + 1,
                space.len()
            );
        }

        let eligible: Vec<usize> = view
            .feature_ids
            .iter()
            .copied()
            .filter(|f| space.binary_search(f).is_ok())
            .collect();
        let count = ((config.remove_fraction * view.feature_ids.len() as f64).round() as usize).min(eligible.len());
        let mut stream = rng::substream(config.seed, rng::VIEW_REMOVAL + g as u64);
        let mut removed: Vec<usize> = sample(&mut stream, eligible.len(), count)
            .into_iter()
            .map(|k| eligible[k])
            .collect();
        removed.sort_unstable();
        space.retain(|f| removed.binary_search(f).is_err());

        views.push(view);
        removed_log.push(removed);
    }
    Ok(ViewSet::assemble(views, removed_log, ctx, n_f))
}

/// Discretizes `d` per `config` and builds the views.
pub fn partition(d: &Dataset, config: &SpfpConfig) -> Result<ViewSet, SpfpError> {
    config.validate()?;
    let coded = discretize(d, config.bins, config.discretizer);
    let ctx = SpfpContext::new(&d.features, &coded, &d.target, config.relevance_correlation);
    partition_with_context(&ctx, config)
}

#[cfg(test)]
mod tests;
