//! Brute-force references shared by the integration tests. Everything here
//! counts tuples directly instead of going through the library.

#![allow(dead_code)]

use std::collections::HashMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use spfp::Dataset;

pub fn log2(x: f64) -> f64 {
    x.log2()
}

/// Row tuples of the given columns.
pub fn tuples(n: usize, columns: &[&[u32]]) -> Vec<Vec<u32>> {
    (0..n).map(|i| columns.iter().map(|c| c[i]).collect()).collect()
}

fn counts<K: std::hash::Hash + Eq>(keys: impl Iterator<Item = K>) -> HashMap<K, usize> {
    let mut m = HashMap::new();
    for k in keys {
        *m.entry(k).or_insert(0) += 1;
    }
    m
}

/// `-sum p log2 p` over the joint values of `columns`.
pub fn tuple_entropy(n: usize, columns: &[&[u32]]) -> f64 {
    let nf = n as f64;
    counts(tuples(n, columns).into_iter())
        .values()
        .map(|&c| {
            let p = c as f64 / nf;
            -p * log2(p)
        })
        .sum()
}

/// Dense ids for the joint values of `columns` (all zeros when empty).
pub fn encode(n: usize, columns: &[&[u32]]) -> Vec<u32> {
    let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
    tuples(n, columns)
        .into_iter()
        .map(|t| {
            let next = ids.len() as u32;
            *ids.entry(t).or_insert(next)
        })
        .collect()
}

/// `sum p(x,y) log2(p(x,y) / (p(x) p(y)))`.
pub fn mi(x: &[u32], y: &[u32]) -> f64 {
    let n = x.len() as f64;
    let pxy = counts(x.iter().zip(y));
    let px = counts(x.iter());
    let py = counts(y.iter());
    pxy.iter()
        .map(|((a, b), &c)| {
            let p = c as f64 / n;
            p * log2(p * n * n / (px[a] as f64 * py[b] as f64))
        })
        .sum()
}

/// `sum p(x,y,z) log2(p(z) p(x,y,z) / (p(x,z) p(y,z)))`.
pub fn cmi(x: &[u32], y: &[u32], z: &[u32]) -> f64 {
    let n = x.len() as f64;
    let pxyz = counts((0..x.len()).map(|i| (x[i], y[i], z[i])));
    let pxz = counts((0..x.len()).map(|i| (x[i], z[i])));
    let pyz = counts((0..x.len()).map(|i| (y[i], z[i])));
    let pz = counts(z.iter().copied());
    pxyz.iter()
        .map(|(&(a, b, c), &k)| {
            let p = k as f64 / n;
            p * log2(pz[&c] as f64 * k as f64 / (pxz[&(a, c)] as f64 * pyz[&(b, c)] as f64))
        })
        .sum()
}

pub fn pearson_abs(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        (sxy / (sxx * syy).sqrt()).abs()
    }
}

pub fn random_column(rng: &mut ChaCha8Rng, n: usize, card: u32) -> Vec<u32> {
    (0..n).map(|_| rng.random_range(0..card)).collect()
}

/// Small coded dataset: feature columns and a target, with the target
/// loosely tied to the first feature so the scores are not all noise.
pub struct Coded {
    pub columns: Vec<Vec<u32>>,
    pub target: Vec<u32>,
}

impl Coded {
    pub fn random(rng: &mut ChaCha8Rng, max_features: usize, max_rows: usize) -> Self {
        let n = rng.random_range(4..=max_rows);
        let f = rng.random_range(1..=max_features);
        let columns: Vec<Vec<u32>> = (0..f)
            .map(|_| {
                let card = rng.random_range(1..=4);
                random_column(rng, n, card)
            })
            .collect();
        let classes = rng.random_range(2..=3u32);
        let target = (0..n)
            .map(|i| {
                if rng.random_bool(0.5) {
                    columns[0][i] % classes
                } else {
                    rng.random_range(0..classes)
                }
            })
            .collect();
        Self { columns, target }
    }

    pub fn n(&self) -> usize {
        self.target.len()
    }

    pub fn raw(&self) -> Vec<Vec<f64>> {
        self.columns.iter().map(|c| c.iter().map(|&v| f64::from(v)).collect()).collect()
    }

    pub fn refs(&self, ids: &[usize]) -> Vec<&[u32]> {
        ids.iter().map(|&j| self.columns[j].as_slice()).collect()
    }

    /// As a dataset; fails when the target has a single class.
    pub fn dataset(&self) -> Option<Dataset> {
        let k = *self.target.iter().max()? as usize + 1;
        let mut seen = vec![false; k];
        for &y in &self.target {
            seen[y as usize] = true;
        }
        let names = (0..self.columns.len()).map(|j| format!("f{j}")).collect();
        let classes = (0..k).map(|c| format!("c{c}")).collect();
        seen.iter().all(|&s| s).then(|| Dataset::new(self.raw(), names, self.target.clone(), classes).ok())?
    }
}

/// Reference greedy step: the objective of `candidate` given `selected`.
pub fn objective(c: &Coded, raw: &[Vec<f64>], candidate: usize, selected: &[usize]) -> f64 {
    let y: Vec<f64> = c.target.iter().map(|&v| f64::from(v)).collect();
    let relevance = pearson_abs(&raw[candidate], &y) + mi(&c.columns[candidate], &c.target);
    if selected.is_empty() {
        return relevance;
    }
    let k = selected.len() as f64;
    let redundancy: f64 = selected.iter().map(|&s| mi(&c.columns[s], &c.columns[candidate])).sum();
    let complementarity: f64 = selected
        .iter()
        .map(|&s| cmi(&c.columns[s], &c.columns[candidate], &c.target))
        .sum();
    relevance - redundancy / k + complementarity / k
}

/// Selection order of the reference greedy search over `pool`.
pub fn greedy_reference(c: &Coded, pool: &[usize], n_f: usize, tol: f64, tie_epsilon: f64) -> Vec<usize> {
    let n = c.n();
    let raw = c.raw();
    let all: Vec<usize> = (0..c.columns.len()).collect();
    let h_f = tuple_entropy(n, &c.refs(&all));
    let mut with_y = c.refs(&all);
    with_y.push(&c.target);
    let h_fy = tuple_entropy(n, &with_y);

    let mut available: Vec<usize> = pool.to_vec();
    available.sort_unstable();
    let mut selected: Vec<usize> = Vec::new();
    loop {
        let h_s = tuple_entropy(n, &c.refs(&selected));
        let mut cols = c.refs(&selected);
        cols.push(&c.target);
        let h_sy = tuple_entropy(n, &cols);
        let done = selected.len() >= n_f && h_s >= h_f * (1.0 - tol) && h_sy >= h_fy * (1.0 - tol);
        if done || available.is_empty() {
            return selected;
        }
        let scores: Vec<f64> = available.iter().map(|&f| objective(c, &raw, f, &selected)).collect();
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let cut = max - tie_epsilon * max.abs().max(1.0);
        let pos = scores.iter().position(|&s| s >= cut).unwrap();
        selected.push(available.remove(pos));
    }
}
