use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use indexmap::IndexMap;
use log::{info, warn};
use serde::{Deserialize, Serialize};

use super::config::config_error;
use super::{CliError, DataArgs, DiagnoseArgs, EvaluateArgs, PartitionArgs, RunConfig, StatsArgs};
use crate::dataset::{discretize, load_csv, split_indices, Dataset, DatasetError, LoadOptions, TargetColumn};
use crate::ensemble::{
    evaluate_builtin, evaluate_imported, macro_auc, read_proba_csv, view_model_name, EnsembleError,
    EnsembleSpec, Evaluation, MetricReport, TrainingSummary, WeightSource, ALL_MODEL,
};
use crate::spfp::{
    conditional_independence_report, partition, view_stats, IndependenceReport, MinFeatures, SpfpError,
    ViewSet, ViewStats,
};
use crate::stats::{win_tie_loss, MetricInput, MetricVerdicts, RunMatrix, StatsError, VerdictOptions, WtlCounts};
use crate::FORMAT_VERSION;

const CONOVER_FORMULA: &str = "t = |R_i - R_j| / sqrt(2 (n A - sum_j R_j^2) / ((n - 1)(k - 1))), \
two-sided Student t with (n - 1)(k - 1) df; R = within-block rank sums, A = sum of squared ranks";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewsArtifact {
    pub format_version: String,
    pub config: RunConfig,
    /// False when the feature space ran out before all views were built.
    pub complete: bool,
    pub feature_names: Vec<String>,
    pub view_set: ViewSet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitArtifact {
    pub format_version: String,
    pub split: crate::dataset::SplitSpec,
    /// Data row indices (0-based, header excluded) of each side.
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewStatsArtifact {
    pub format_version: String,
    pub config: RunConfig,
    pub stats: ViewStats,
    pub view_features: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsArtifact {
    pub format_version: String,
    pub config: RunConfig,
    pub source: String,
    pub weight_source: WeightSource,
    pub member_aucs: Vec<f64>,
    pub ensembles: IndexMap<String, EnsembleSpec>,
    pub models: IndexMap<String, MetricReport>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub training: IndexMap<String, TrainingSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndependenceArtifact {
    pub format_version: String,
    pub config: RunConfig,
    pub report: IndependenceReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsConfig {
    pub format_version: String,
    pub inputs: Vec<PathBuf>,
    pub benchmark: String,
    pub alpha: f64,
    pub replicates: usize,
    pub confidence: f64,
    pub seed: u64,
    pub lower_is_better: Vec<String>,
    pub outside_family: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictsArtifact {
    pub format_version: String,
    pub config: StatsConfig,
    pub conover: String,
    /// dataset -> metric -> verdicts
    pub datasets: IndexMap<String, IndexMap<String, MetricVerdicts>>,
    /// metric -> model -> counts over datasets
    pub summary: IndexMap<String, IndexMap<String, WtlCounts>>,
}

fn data_err(e: impl std::fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path).map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))
}

/// Wall-clock data goes to a sidecar so the main artifacts stay reproducible.
fn write_timings(out: &Path, command: &str, timings: serde_json::Value) -> Result<(), CliError> {
    let now = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let value = serde_json::json!({ "command": command, "unix_time": now, "seconds": timings });
    write_json(&out.join(format!("{command}.timings.json")), &value)
}

fn base_config(data: &DataArgs, fallback: Option<RunConfig>) -> Result<RunConfig, CliError> {
    let mut c = match &data.config {
        Some(path) => RunConfig::from_file(path)?,
        None => fallback.unwrap_or_default(),
    };
    if let Some(v) = &data.input {
        c.input = v.clone();
    }
    if let Some(v) = &data.target {
        c.target = v.clone();
    }
    if let Some(v) = &data.out {
        c.out = v.clone();
    }
    if let Some(v) = data.missing {
        c.missing = v;
    }
    Ok(c)
}

fn load(c: &RunConfig) -> Result<Dataset, CliError> {
    load_csv(&c.input, &TargetColumn::Name(c.target.clone()), &LoadOptions { missing: c.missing }).map_err(data_err)
}

/// Train and test rows recorded by `partition`, as dataset row positions.
fn recorded_split(d: &Dataset, split_path: &Path) -> Result<(Vec<usize>, Vec<usize>), CliError> {
    let s: SplitArtifact = read_json(split_path)?;
    let position: HashMap<usize, usize> = d.source_rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let map = |rows: &[usize]| -> Result<Vec<usize>, CliError> {
        rows.iter()
            .map(|r| {
                position.get(r).copied().ok_or_else(|| {
                    CliError::Data(format!("{}: row {r} not present in the input", split_path.display()))
                })
            })
            .collect()
    };
    Ok((map(&s.train)?, map(&s.test)?))
}

fn apply_partition_flags(c: &mut RunConfig, a: &PartitionArgs) {
    let s = &mut c.spfp;
    if let Some(v) = a.views {
        s.n_views = v;
    }
    if let Some(v) = a.min_frac {
        s.min_features = MinFeatures::Fraction(v);
    }
    if let Some(v) = a.min_count {
        s.min_features = MinFeatures::Count(v);
    }
    if let Some(v) = a.remove_frac {
        s.remove_fraction = v;
    }
    if let Some(v) = a.bins {
        s.bins = v;
    }
    if let Some(v) = a.discretizer {
        s.discretizer = v;
    }
    if let Some(v) = a.tolerance {
        s.entropy_tolerance = v;
    }
    if let Some(v) = a.correlation {
        s.relevance_correlation = v;
    }
    if let Some(v) = a.seed {
        s.seed = v;
    }
    if let Some(v) = a.split_seed {
        c.split.seed = v;
        c.model.seed = v;
    }
    if let Some(v) = a.test_frac {
        c.split.test_fraction = v;
    }
}

pub fn cmd_partition(a: &PartitionArgs) -> Result<(), CliError> {
    let mut c = base_config(&a.data, None)?;
    apply_partition_flags(&mut c, a);
    c.validate()?;
    let d = load(&c)?;
    if d.dropped_rows > 0 {
        info!("dropped {} rows with missing cells", d.dropped_rows);
    }
    let (train_idx, test_idx) = split_indices(&d.target, &d.class_names, &c.split).map_err(|e| match e {
        DatasetError::InvalidSplit(m) => CliError::Config(format!("invalid --test-frac: {m}")),
        other => data_err(other),
    })?;
    let train = d.select_rows(&train_idx);
    create_dir(&c.out)?;
    write_json(
        &c.out.join("split.json"),
        &SplitArtifact {
            format_version: FORMAT_VERSION.into(),
            split: c.split,
            train: train.source_rows.clone(),
            test: test_idx.iter().map(|&i| d.source_rows[i]).collect(),
        },
    )?;

    let start = Instant::now();
    let (view_set, complete) = match partition(&train, &c.spfp) {
        Ok(vs) => (vs, true),
        Err(SpfpError::FeatureSpaceExhausted { built, requested }) => {
            warn!("feature space exhausted after {} of {requested} views", built.views.len());
            (*built, false)
        }
        Err(e @ (SpfpError::Config { .. } | SpfpError::MinFeaturesTooLarge { .. })) => return Err(config_error(e)),
        Err(e) => return Err(data_err(e)),
    };
    let total = start.elapsed().as_secs_f64();

    let artifact = ViewsArtifact {
        format_version: FORMAT_VERSION.into(),
        config: c.clone(),
        complete,
        feature_names: d.feature_names.clone(),
        view_set,
    };
    write_json(&c.out.join("views.json"), &artifact)?;
    let vs = &artifact.view_set;
    write_timings(
        &c.out,
        "partition",
        serde_json::json!({ "total": total, "views": vs.elapsed() }),
    )?;
    if !complete {
        return Err(CliError::Data(format!(
            "feature space exhausted after {} of {} views; partial views.json written",
            vs.views.len(),
            c.spfp.n_views
        )));
    }

    let stats = view_stats(vs, vs.n_features);
    let view_features = vs
        .views
        .iter()
        .map(|v| v.feature_ids.iter().map(|&j| d.feature_names[j].clone()).collect())
        .collect();
    write_json(
        &c.out.join("view_stats.json"),
        &ViewStatsArtifact {
            format_version: FORMAT_VERSION.into(),
            config: c.clone(),
            stats: stats.clone(),
            view_features,
        },
    )?;

    println!(
        "{} rows ({} train), {} features, {} classes; N_F = {}; H(F) = {:.4}, H(F,Y) = {:.4} bits",
        d.n_rows(),
        train.n_rows(),
        d.n_features(),
        d.n_classes(),
        vs.min_features,
        vs.h_f,
        vs.h_fy
    );
    println!("{:>5} {:>6} {:>7} {:>9} {:>9}  termination", "view", "size", "ratio", "H(S)", "H(S,Y)");
    for (g, v) in vs.views.iter().enumerate() {
        println!(
            "{:>5} {:>6} {:>7.3} {:>9.4} {:>9.4}  {:?}",
            view_model_name(g),
            v.feature_ids.len(),
            stats.ratios[g],
            v.h_s,
            v.h_sy,
            v.termination
        );
    }
    println!(
        "union {} ({:.3}), intersection {}",
        stats.union_size, stats.union_ratio, stats.intersection_size
    );
    Ok(())
}

/// Reads the views artifact and the config it carries, with flag overrides.
/// Outputs go next to the views file unless `--out` says otherwise.
fn load_views(data: &DataArgs, views_file: &Option<PathBuf>) -> Result<(ViewsArtifact, RunConfig), CliError> {
    let path = match views_file {
        Some(p) => p.clone(),
        None => data.out.clone().unwrap_or_else(|| RunConfig::default().out).join("views.json"),
    };
    if !path.exists() {
        return Err(CliError::Data(format!("{}: views file not found", path.display())));
    }
    let artifact: ViewsArtifact = read_json(&path)?;
    let mut c = base_config(data, Some(artifact.config.clone()))?;
    if data.out.is_none() {
        c.out = path.parent().map(Path::to_path_buf).unwrap_or_default();
    }
    Ok((artifact, c))
}

fn load_checked(c: &RunConfig, artifact: &ViewsArtifact) -> Result<Dataset, CliError> {
    let d = load(c)?;
    if d.n_features() != artifact.view_set.n_features {
        return Err(CliError::Data(format!(
            "{} has {} features but the views were built on {}",
            c.input.display(),
            d.n_features(),
            artifact.view_set.n_features
        )));
    }
    Ok(d)
}

pub fn cmd_evaluate(a: &EvaluateArgs) -> Result<(), CliError> {
    let (artifact, mut c) = load_views(&a.data, &a.views_file)?;
    if let Some(v) = a.l2 {
        c.model.logistic.l2 = v;
    }
    if let Some(v) = a.max_iters {
        c.model.logistic.max_iters = v;
    }
    if let Some(v) = a.validation_frac {
        c.model.validation_fraction = v;
    }
    c.validate()?;
    let d = load_checked(&c, &artifact)?;
    let (train_idx, test_idx) = recorded_split(&d, &c.out.join("split.json"))?;
    let train = d.select_rows(&train_idx);
    let test = d.select_rows(&test_idx);
    let views: Vec<Vec<usize>> = artifact.view_set.views.iter().map(|v| v.feature_ids.clone()).collect();
    if views.is_empty() {
        return Err(CliError::Data("views file holds no views".into()));
    }

    let (evaluation, source) = match &a.import_proba {
        None => (
            evaluate_builtin(&train, &test, &views, &c.model).map_err(data_err)?,
            "builtin_logistic".to_string(),
        ),
        Some(dir) => (imported(dir, &d, &train, &test, views.len())?, format!("imported:{}", dir.display())),
    };

    let Evaluation { models, ensembles, member_aucs, weight_source, training } = evaluation;
    let timings: IndexMap<String, f64> = models.iter().map(|(k, m)| (k.clone(), m.elapsed)).collect();
    create_dir(&c.out)?;
    write_json(
        &c.out.join("metrics.json"),
        &MetricsArtifact {
            format_version: FORMAT_VERSION.into(),
            config: c.clone(),
            source,
            weight_source,
            member_aucs,
            ensembles,
            models: models.clone(),
            training,
        },
    )?;
    write_timings(&c.out, "evaluate", serde_json::to_value(&timings).unwrap_or_default())?;

    println!("{:>8} {:>8} {:>8} {:>9} {:>8} {:>8}", "model", "f1", "auc", "log_loss", "mec", "mew");
    let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.4}"));
    for (name, m) in &models {
        println!(
            "{:>8} {:>8.4} {:>8.4} {:>9.4} {:>8} {:>8}",
            name,
            m.f1_micro,
            m.auc,
            m.log_loss,
            opt(m.mec),
            opt(m.mew)
        );
    }
    Ok(())
}

fn imported(dir: &Path, d: &Dataset, train: &Dataset, test: &Dataset, n_views: usize) -> Result<Evaluation, CliError> {
    let c = d.n_classes();
    let read = |name: &str| -> Result<crate::ensemble::ImportedProba, CliError> {
        read_proba_csv(&dir.join(name), c).map_err(|e| match e {
            EnsembleError::Csv { .. } | EnsembleError::BadProbabilities { .. } | EnsembleError::ClassMismatch { .. } => {
                data_err(e)
            }
            other => CliError::Internal(other.to_string()),
        })
    };
    let mut view_probas = Vec::with_capacity(n_views);
    for g in 0..n_views {
        view_probas.push(read(&format!("{}.csv", view_model_name(g)))?.align(&test.source_rows).map_err(data_err)?);
    }
    let all = read(&format!("{ALL_MODEL}.csv"))?.align(&test.source_rows).map_err(data_err)?;

    let val_files: Vec<PathBuf> = (0..n_views).map(|g| dir.join(format!("{}.val.csv", view_model_name(g)))).collect();
    let present = val_files.iter().filter(|p| p.exists()).count();
    let validation_aucs = if present == n_views {
        let truth_of: HashMap<usize, u32> = train.source_rows.iter().copied().zip(train.target.iter().copied()).collect();
        let mut aucs = Vec::with_capacity(n_views);
        for g in 0..n_views {
            let imp = read(&format!("{}.val.csv", view_model_name(g)))?;
            let mut ids: Vec<usize> = imp.rows.keys().copied().collect();
            ids.sort_unstable();
            let truth = ids
                .iter()
                .map(|id| {
                    truth_of.get(id).copied().ok_or_else(|| {
                        CliError::Data(format!("{}: row {id} is not a training row", imp.path))
                    })
                })
                .collect::<Result<Vec<u32>, _>>()?;
            let proba = imp.align(&ids).map_err(data_err)?;
            aucs.push(macro_auc(&proba, &truth, c).map_err(data_err)?);
        }
        Some(aucs)
    } else {
        if present > 0 {
            warn!("only {present} of {n_views} validation files present; weighting by test AUC");
        }
        None
    };
    evaluate_imported(&test.target, &view_probas, &all, validation_aucs).map_err(data_err)
}

pub fn cmd_diagnose(a: &DiagnoseArgs) -> Result<(), CliError> {
    let (artifact, c) = load_views(&a.data, &a.views_file)?;
    c.validate()?;
    let d = load_checked(&c, &artifact)?;
    let (train_idx, _) = recorded_split(&d, &c.out.join("split.json"))?;
    let train = d.select_rows(&train_idx);
    let coded = discretize(&train, c.spfp.bins, c.spfp.discretizer);
    let report = conditional_independence_report(&artifact.view_set, &coded, &train.target, a.cmi_tolerance)
        .map_err(data_err)?;
    create_dir(&c.out)?;
    write_json(
        &c.out.join("independence.json"),
        &IndependenceArtifact {
            format_version: FORMAT_VERSION.into(),
            config: c.clone(),
            report: report.clone(),
        },
    )?;
    println!(
        "H(F) = {:.4}, H(Y) = {:.4} bits; H(F) <= H(Y): {}",
        report.h_f, report.h_y, report.h_f_le_h_y
    );
    for p in &report.pairs {
        println!("I({}; {} | Y) = {:.6}", view_model_name(p.a), view_model_name(p.b), p.cmi);
    }
    println!(
        "conditional independence {}",
        if report.independence_violated { "violated" } else { "holds" }
    );
    Ok(())
}

fn stats_err(e: StatsError) -> CliError {
    match e {
        StatsError::TooFewReplicates(_) | StatsError::Confidence(_) | StatsError::MissingBenchmark(_) => {
            CliError::Config(e.to_string())
        }
        other => data_err(other),
    }
}

pub fn cmd_stats(a: &StatsArgs) -> Result<(), CliError> {
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(CliError::Config(format!("invalid --alpha: {} outside (0, 1)", a.alpha)));
    }
    let opts = VerdictOptions {
        benchmark: a.benchmark.clone(),
        alpha: a.alpha,
        replicates: a.bootstrap,
        confidence: a.confidence,
        seed: a.seed,
    };
    let mut datasets = IndexMap::new();
    let mut summary: IndexMap<String, IndexMap<String, WtlCounts>> = IndexMap::new();
    for dir in &a.input {
        if !dir.is_dir() {
            return Err(CliError::Data(format!("{}: not a directory", dir.display())));
        }
        let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
            .map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "csv"))
            .collect();
        files.sort();
        if files.is_empty() {
            return Err(CliError::Data(format!("{}: no metric CSV files", dir.display())));
        }
        let mut inputs = Vec::with_capacity(files.len());
        for f in &files {
            let name = f.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let lower = a.lower_is_better.contains(&name);
            inputs.push(MetricInput {
                matrix: RunMatrix::read_csv(f, !lower).map_err(stats_err)?,
                in_family: !a.outside_family.contains(&name),
                name,
            });
        }
        let verdicts = win_tie_loss(&inputs, &opts).map_err(stats_err)?;
        for (metric, mv) in &verdicts {
            let row = summary.entry(metric.clone()).or_default();
            for (model, v) in &mv.verdicts {
                row.entry(model.clone()).or_default().add(v.outcome);
            }
        }
        let name = dir
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| dir.display().to_string());
        datasets.insert(name, verdicts);
    }

    create_dir(&a.out)?;
    let artifact = VerdictsArtifact {
        format_version: FORMAT_VERSION.into(),
        config: StatsConfig {
            format_version: FORMAT_VERSION.into(),
            inputs: a.input.clone(),
            benchmark: a.benchmark.clone(),
            alpha: a.alpha,
            replicates: a.bootstrap,
            confidence: a.confidence,
            seed: a.seed,
            lower_is_better: a.lower_is_better.clone(),
            outside_family: a.outside_family.clone(),
        },
        conover: CONOVER_FORMULA.into(),
        datasets,
        summary,
    };
    write_json(&a.out.join("verdicts.json"), &artifact)?;
    for (metric, row) in &artifact.summary {
        let cells: Vec<String> = row.iter().map(|(m, c)| format!("{m}: {c}")).collect();
        println!("{metric:>10}  {}", cells.join("  "));
    }
    Ok(())
}
