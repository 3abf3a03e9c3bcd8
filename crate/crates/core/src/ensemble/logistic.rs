use serde::{Deserialize, Serialize};

use super::EnsembleError;
use crate::dataset::Dataset;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticConfig {
    /// Penalty on the non-intercept weights: `l2 / 2 * |W|^2`.
    pub l2: f64,
    pub max_iters: usize,
    /// Stop once the largest gradient component falls below this.
    pub tol: f64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        Self {
            l2: 1e-2,
            max_iters: 300,
            tol: 1e-5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    BuiltinLogistic,
    Imported,
}

/// A fitted class-probability model over a subset of columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbModel {
    pub kind: ModelKind,
    pub feature_ids: Vec<usize>,
    pub n_classes: usize,
    /// Standardization applied before the linear map.
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
    /// `weights[0]` is the intercept row, `weights[j + 1]` belongs to
    /// `feature_ids[j]`; one column per class.
    pub weights: Vec<Vec<f64>>,
    pub iterations: usize,
    pub final_loss: f64,
}

impl ProbModel {
    /// Class probabilities for every row of `d`, which must have the column
    /// layout the model was trained on.
    pub fn predict_proba(&self, d: &Dataset) -> Result<Vec<Vec<f64>>, EnsembleError> {
        if self.kind != ModelKind::BuiltinLogistic {
            return Err(EnsembleError::NotPredictive);
        }
        if let Some(&j) = self.feature_ids.iter().find(|&&j| j >= d.n_features()) {
            return Err(EnsembleError::Shape(format!("feature {j} out of range")));
        }
        let columns: Vec<Vec<f64>> = self
            .feature_ids
            .iter()
            .enumerate()
            .map(|(k, &j)| standardize(&d.features[j], self.means[k], self.scales[k]))
            .collect();
        let flat = flatten(&self.weights);
        let logits = logits(&columns, d.n_rows(), self.n_classes, &flat);
        Ok(logits
            .chunks(self.n_classes)
            .map(|z| {
                let mut p = z.to_vec();
                softmax_in_place(&mut p);
                p
            })
            .collect())
    }
}

fn standardize(col: &[f64], mean: f64, scale: f64) -> Vec<f64> {
    col.iter().map(|v| (v - mean) / scale).collect()
}

fn flatten(w: &[Vec<f64>]) -> Vec<f64> {
    w.iter().flatten().copied().collect()
}

/// Row-major `n x c` logits for flat weights laid out as `(d + 1) x c`.
fn logits(columns: &[Vec<f64>], n: usize, c: usize, w: &[f64]) -> Vec<f64> {
    let mut z = Vec::with_capacity(n * c);
    for _ in 0..n {
        z.extend_from_slice(&w[..c]);
    }
    for (j, col) in columns.iter().enumerate() {
        let wj = &w[(j + 1) * c..(j + 2) * c];
        for (i, &x) in col.iter().enumerate() {
            if x != 0.0 {
                for (zc, &wc) in z[i * c..(i + 1) * c].iter_mut().zip(wj) {
                    *zc += x * wc;
                }
            }
        }
    }
    z
}

fn softmax_in_place(z: &mut [f64]) -> f64 {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in z.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in z.iter_mut() {
        *v /= sum;
    }
    max + sum.ln()
}

pub(crate) struct Problem {
    pub columns: Vec<Vec<f64>>,
    pub target: Vec<u32>,
    pub n_classes: usize,
    pub l2: f64,
}

impl Problem {
    pub fn n_params(&self) -> usize {
        (self.columns.len() + 1) * self.n_classes
    }

    /// Penalized mean negative log-likelihood (nats) and its gradient.
    pub fn loss_and_gradient(&self, w: &[f64]) -> (f64, Vec<f64>) {
        let n = self.target.len();
        let c = self.n_classes;
        let mut z = logits(&self.columns, n, c, w);
        let mut nll = 0.0;
        for (i, &y) in self.target.iter().enumerate() {
            let row = &mut z[i * c..(i + 1) * c];
            let y_logit = row[y as usize];
            nll += softmax_in_place(row) - y_logit;
            row[y as usize] -= 1.0;
        }
        // z now holds the residuals p - onehot
        let inv_n = 1.0 / n as f64;
        let mut grad = vec![0.0; w.len()];
        for row in z.chunks(c) {
            for (g, r) in grad[..c].iter_mut().zip(row) {
                *g += r;
            }
        }
        for (j, col) in self.columns.iter().enumerate() {
            let gj = &mut grad[(j + 1) * c..(j + 2) * c];
            for (i, &x) in col.iter().enumerate() {
                if x != 0.0 {
                    for (g, r) in gj.iter_mut().zip(&z[i * c..(i + 1) * c]) {
                        *g += x * r;
                    }
                }
            }
        }
        let mut penalty = 0.0;
        for (k, g) in grad.iter_mut().enumerate() {
            *g *= inv_n;
            if k >= c {
                *g += self.l2 * w[k];
                penalty += w[k] * w[k];
            }
        }
        (nll * inv_n + 0.5 * self.l2 * penalty, grad)
    }
}

/// Multinomial logistic regression on the columns `feature_ids` of `train`,
/// fit from zero weights by gradient descent with backtracking line search.
pub fn train_builtin(
    train: &Dataset,
    feature_ids: &[usize],
    config: &LogisticConfig,
) -> Result<ProbModel, EnsembleError> {
    if train.class_counts().iter().filter(|&&c| c > 0).count() < 2 {
        return Err(EnsembleError::SingleClass);
    }
    if let Some(&j) = feature_ids.iter().find(|&&j| j >= train.n_features()) {
        return Err(EnsembleError::Shape(format!("feature {j} out of range")));
    }
    let c = train.n_classes();
    let mut means = Vec::with_capacity(feature_ids.len());
    let mut scales = Vec::with_capacity(feature_ids.len());
    let mut columns = Vec::with_capacity(feature_ids.len());
    for &j in feature_ids {
        let col = &train.features[j];
        let n = col.len() as f64;
        let mean = col.iter().sum::<f64>() / n;
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let scale = if var > 0.0 { var.sqrt() } else { 1.0 };
        columns.push(standardize(col, mean, scale));
        means.push(mean);
        scales.push(scale);
    }
    let problem = Problem {
        columns,
        target: train.target.clone(),
        n_classes: c,
        l2: config.l2,
    };

    let mut w = vec![0.0; problem.n_params()];
    let (mut loss, mut grad) = problem.loss_and_gradient(&w);
    let mut step = 1.0;
    let mut iterations = 0;
    while iterations < config.max_iters {
        let gmax = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if gmax < config.tol {
            break;
        }
        iterations += 1;
        let gnorm2: f64 = grad.iter().map(|g| g * g).sum();
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = w.iter().zip(&grad).map(|(wi, gi)| wi - step * gi).collect();
            let (trial_loss, trial_grad) = problem.loss_and_gradient(&trial);
            if trial_loss <= loss - 1e-4 * step * gnorm2 {
                w = trial;
                loss = trial_loss;
                grad = trial_grad;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        step = (step * 2.0).min(1e4);
    }

    Ok(ProbModel {
        kind: ModelKind::BuiltinLogistic,
        feature_ids: feature_ids.to_vec(),
        n_classes: c,
        means,
        scales,
        weights: w.chunks(c).map(<[f64]>::to_vec).collect(),
        iterations,
        final_loss: loss,
    })
}
