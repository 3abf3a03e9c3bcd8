use std::time::Instant;

use indexmap::IndexMap;
use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    ensemble_predict, ensemble_weights, macro_auc, metrics, train_builtin, EnsembleError,
    EnsembleSpec, LogisticConfig, MetricReport,
};
use crate::dataset::{split_indices_on, Dataset, SplitSpec};
use crate::rng;

/// Name of the benchmark model trained on every feature.
pub const ALL_MODEL: &str = "All";

pub fn view_model_name(g: usize) -> String {
    format!("theta_{}", g + 1)
}

pub fn ensemble_name(k: usize) -> String {
    format!("E_1:{k}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluateConfig {
    pub logistic: LogisticConfig,
    /// Share of the training rows held out to measure member AUCs; the
    /// members are then refit on all training rows. 0 measures AUC on the
    /// training rows themselves.
    pub validation_fraction: f64,
    pub seed: u64,
}

impl Default for EvaluateConfig {
    fn default() -> Self {
        Self {
            logistic: LogisticConfig::default(),
            validation_fraction: 0.2,
            seed: 0,
        }
    }
}

/// Where the ensemble weights' AUC values were measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightSource {
    Validation,
    Train,
    ImportedValidation,
    Test,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingSummary {
    pub n_features: usize,
    pub iterations: usize,
    pub final_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub models: IndexMap<String, MetricReport>,
    pub ensembles: IndexMap<String, EnsembleSpec>,
    pub member_aucs: Vec<f64>,
    pub weight_source: WeightSource,
    #[serde(skip_serializing_if = "IndexMap::is_empty", default)]
    pub training: IndexMap<String, TrainingSummary>,
}

impl Evaluation {
    /// Seconds per model, for the timing sidecar.
    pub fn timings(&self) -> IndexMap<String, f64> {
        self.models.iter().map(|(k, m)| (k.clone(), m.elapsed)).collect()
    }
}

struct Member {
    test_proba: Vec<Vec<f64>>,
    auc: f64,
    elapsed: f64,
    summary: TrainingSummary,
}

/// Trains one model per view plus the all-feature benchmark and scores them,
/// together with the prefix ensembles, on `test`.
pub fn evaluate_builtin(
    train: &Dataset,
    test: &Dataset,
    views: &[Vec<usize>],
    config: &EvaluateConfig,
) -> Result<Evaluation, EnsembleError> {
    if views.is_empty() {
        return Err(EnsembleError::NoMembers);
    }
    let holdout = if config.validation_fraction > 0.0 {
        let spec = SplitSpec {
            test_fraction: config.validation_fraction,
            seed: config.seed,
            stratified: true,
        };
        match split_indices_on(&train.target, &train.class_names, &spec, rng::VALIDATION) {
            Ok((fit, val)) => Some((train.select_rows(&fit), train.select_rows(&val))),
            Err(e) => {
                warn!("no validation hold-out ({e}); member AUCs use the training rows");
                None
            }
        }
    } else {
        None
    };
    let weight_source = if holdout.is_some() { WeightSource::Validation } else { WeightSource::Train };

    let members: Vec<Member> = views
        .par_iter()
        .map(|view| {
            let start = Instant::now();
            let model = train_builtin(train, view, &config.logistic)?;
            let test_proba = model.predict_proba(test)?;
            let elapsed = start.elapsed().as_secs_f64();
            let auc = match &holdout {
                Some((fit, val)) => {
                    let m = train_builtin(fit, view, &config.logistic)?;
                    macro_auc(&m.predict_proba(val)?, &val.target, train.n_classes())?
                }
                None => macro_auc(&model.predict_proba(train)?, &train.target, train.n_classes())?,
            };
            Ok(Member {
                test_proba,
                auc,
                elapsed,
                summary: TrainingSummary {
                    n_features: view.len(),
                    iterations: model.iterations,
                    final_loss: model.final_loss,
                },
            })
        })
        .collect::<Result<_, EnsembleError>>()?;

    let start = Instant::now();
    let all_features: Vec<usize> = (0..train.n_features()).collect();
    let all = train_builtin(train, &all_features, &config.logistic)?;
    let all_proba = all.predict_proba(test)?;
    let all_elapsed = start.elapsed().as_secs_f64();

    let mut training = IndexMap::new();
    for (g, m) in members.iter().enumerate() {
        training.insert(view_model_name(g), m.summary.clone());
    }
    training.insert(
        ALL_MODEL.to_string(),
        TrainingSummary {
            n_features: all_features.len(),
            iterations: all.iterations,
            final_loss: all.final_loss,
        },
    );

    let view_probas: Vec<Vec<Vec<f64>>> = members.iter().map(|m| m.test_proba.clone()).collect();
    let times: Vec<f64> = members.iter().map(|m| m.elapsed).collect();
    let aucs: Vec<f64> = members.iter().map(|m| m.auc).collect();
    let mut out = assemble(
        &test.target,
        &view_probas,
        &times,
        (&all_proba, all_elapsed),
        aucs,
        weight_source,
    )?;
    out.training = training;
    Ok(out)
}

/// Scores externally produced test probabilities. Without validation AUCs
/// the weights come from the members' test AUCs.
pub fn evaluate_imported(
    truth: &[u32],
    view_probas: &[Vec<Vec<f64>>],
    all_proba: &[Vec<f64>],
    validation_aucs: Option<Vec<f64>>,
) -> Result<Evaluation, EnsembleError> {
    if view_probas.is_empty() {
        return Err(EnsembleError::NoMembers);
    }
    let n_classes = all_proba.first().map_or(0, Vec::len);
    let (aucs, source) = match validation_aucs {
        Some(a) => (a, WeightSource::ImportedValidation),
        None => (
            view_probas
                .iter()
                .map(|p| macro_auc(p, truth, n_classes))
                .collect::<Result<_, _>>()?,
            WeightSource::Test,
        ),
    };
    let times = vec![0.0; view_probas.len()];
    assemble(truth, view_probas, &times, (all_proba, 0.0), aucs, source)
}

fn assemble(
    truth: &[u32],
    view_probas: &[Vec<Vec<f64>>],
    times: &[f64],
    (all_proba, all_elapsed): (&[Vec<f64>], f64),
    aucs: Vec<f64>,
    weight_source: WeightSource,
) -> Result<Evaluation, EnsembleError> {
    let mut models = IndexMap::new();
    for (g, (p, &t)) in view_probas.iter().zip(times).enumerate() {
        let mut report = metrics(p, truth)?;
        report.elapsed = t;
        models.insert(view_model_name(g), report);
    }
    let mut ensembles = IndexMap::new();
    for k in 2..=view_probas.len() {
        let start = Instant::now();
        let refs: Vec<&[Vec<f64>]> = view_probas[..k].iter().map(Vec::as_slice).collect();
        let proba = ensemble_predict(&refs, &aucs[..k])?;
        let mut report = metrics(&proba, truth)?;
        report.elapsed = times[..k].iter().sum::<f64>() + start.elapsed().as_secs_f64();
        models.insert(ensemble_name(k), report);
        ensembles.insert(
            ensemble_name(k),
            EnsembleSpec {
                members: (0..k).collect(),
                weights: ensemble_weights(&aucs[..k])?,
            },
        );
    }
    let mut report = metrics(all_proba, truth)?;
    report.elapsed = all_elapsed;
    models.insert(ALL_MODEL.to_string(), report);
    Ok(Evaluation {
        models,
        ensembles,
        member_aucs: aucs,
        weight_source,
        training: IndexMap::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn separable() -> Dataset {
        let n = 60;
        let y: Vec<u32> = (0..n).map(|i| (i % 2) as u32).collect();
        let f0: Vec<f64> = y.iter().enumerate().map(|(i, &c)| c as f64 * 5.0 + (i % 7) as f64 * 0.1).collect();
        let f1: Vec<f64> = y.iter().enumerate().map(|(i, &c)| -(c as f64) * 4.0 + (i % 5) as f64 * 0.1).collect();
        let f2: Vec<f64> = (0..n).map(|i| ((i * 37) % 11) as f64).collect();
        Dataset::new(
            vec![f0, f1, f2],
            vec!["a".into(), "b".into(), "c".into()],
            y,
            vec!["p".into(), "q".into()],
        )
        .unwrap()
    }

    #[test]
    fn separable_views_are_perfect() {
        let d = separable();
        let (train, test) = crate::dataset::split(&d, &SplitSpec::default()).unwrap();
        let views = vec![vec![0], vec![1, 2], vec![0, 1]];
        let ev = evaluate_builtin(&train, &test, &views, &EvaluateConfig::default()).unwrap();
        let names: Vec<&str> = ev.models.keys().map(String::as_str).collect();
        assert_eq!(names, ["theta_1", "theta_2", "theta_3", "E_1:2", "E_1:3", "All"]);
        for (name, r) in &ev.models {
            assert_eq!(r.f1_micro, 1.0, "{name}");
            assert_eq!(r.mew, None);
        }
        assert_eq!(ev.weight_source, WeightSource::Validation);
        let w = &ev.ensembles["E_1:3"].weights;
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_view_has_no_ensembles() {
        let d = separable();
        let (train, test) = crate::dataset::split(&d, &SplitSpec::default()).unwrap();
        let ev = evaluate_builtin(&train, &test, &[vec![0]], &EvaluateConfig::default()).unwrap();
        let names: Vec<&str> = ev.models.keys().map(String::as_str).collect();
        assert_eq!(names, ["theta_1", "All"]);
        assert!(ev.ensembles.is_empty());
    }

    #[test]
    fn imported_uses_test_auc_without_validation() {
        let truth = [0, 1, 1, 0];
        let a = vec![vec![0.9, 0.1], vec![0.2, 0.8], vec![0.3, 0.7], vec![0.6, 0.4]];
        let b = vec![vec![0.4, 0.6], vec![0.5, 0.5], vec![0.2, 0.8], vec![0.7, 0.3]];
        let ev = evaluate_imported(&truth, &[a.clone(), b], &a, None).unwrap();
        assert_eq!(ev.weight_source, WeightSource::Test);
        assert_eq!(ev.member_aucs[0], 1.0);
        assert_eq!(ev.member_aucs[1], 0.75);
        let ev = evaluate_imported(&truth, &[a.clone()], &a, Some(vec![0.5])).unwrap();
        assert_eq!(ev.weight_source, WeightSource::ImportedValidation);
    }
}
