use serde::{Deserialize, Serialize};

use super::Dataset;

/// Binning strategy for continuous columns.
///
/// Integral columns with at most `bins` distinct values are always passed
/// through as dense codes. `PassthroughIfIntegral` additionally passes
/// through integral columns with more distinct values than `bins`, and bins
/// the remaining columns by equal frequency.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Discretizer {
    #[default]
    EqualFrequency,
    EqualWidth,
    PassthroughIfIntegral,
}

impl std::str::FromStr for Discretizer {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "equal_frequency" => Ok(Self::EqualFrequency),
            "equal_width" => Ok(Self::EqualWidth),
            "passthrough_if_integral" => Ok(Self::PassthroughIfIntegral),
            other => Err(format!(
                "unknown discretizer '{other}' (equal_frequency, equal_width, passthrough_if_integral)"
            )),
        }
    }
}

/// Per-column small-integer codes, column-major.
///
/// For every column `j`, the codes cover `0..cardinalities[j]` densely.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodedMatrix {
    pub codes: Vec<Vec<u32>>,
    pub cardinalities: Vec<u32>,
    /// Cut points per column; a value `v` falls in bin `#{e : e < v}`.
    /// Empty for passthrough and constant columns.
    pub bin_edges: Vec<Vec<f64>>,
}

impl CodedMatrix {
    /// Builds a matrix from already-coded columns, densifying each column by
    /// sorted code value.
    pub fn from_codes(columns: Vec<Vec<u32>>) -> Self {
        let mut codes = Vec::with_capacity(columns.len());
        let mut cardinalities = Vec::with_capacity(columns.len());
        for col in columns {
            let (dense, card) = densify_u32(&col);
            codes.push(dense);
            cardinalities.push(card);
        }
        let bin_edges = vec![Vec::new(); codes.len()];
        Self {
            codes,
            cardinalities,
            bin_edges,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.codes.first().map_or(0, Vec::len)
    }

    pub fn n_columns(&self) -> usize {
        self.codes.len()
    }

    pub fn column(&self, j: usize) -> &[u32] {
        &self.codes[j]
    }
}

fn densify_u32(col: &[u32]) -> (Vec<u32>, u32) {
    let mut distinct: Vec<u32> = col.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let dense = col
        .iter()
        .map(|v| distinct.binary_search(v).unwrap() as u32)
        .collect();
    (dense, distinct.len() as u32)
}

/// Maps every feature column to codes suitable for plug-in entropy
/// estimation. `bins` must be at least 2.
pub fn discretize(d: &Dataset, bins: usize, strategy: Discretizer) -> CodedMatrix {
    assert!(bins >= 2, "bins must be at least 2");
    let mut out = CodedMatrix {
        codes: Vec::with_capacity(d.n_features()),
        cardinalities: Vec::with_capacity(d.n_features()),
        bin_edges: Vec::with_capacity(d.n_features()),
    };
    for col in &d.features {
        let (codes, card, edges) = discretize_column(col, bins, strategy);
        out.codes.push(codes);
        out.cardinalities.push(card);
        out.bin_edges.push(edges);
    }
    out
}

fn discretize_column(col: &[f64], bins: usize, strategy: Discretizer) -> (Vec<u32>, u32, Vec<f64>) {
    let mut sorted = col.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut distinct = sorted.clone();
    distinct.dedup();

    let integral = col.iter().all(|v| v.fract() == 0.0);
    let passthrough = distinct.len() <= 1
        || (integral
            && (distinct.len() <= bins || strategy == Discretizer::PassthroughIfIntegral));
    if passthrough {
        let codes = col
            .iter()
            .map(|v| distinct.partition_point(|d| d < v) as u32)
            .collect();
        return (codes, distinct.len() as u32, Vec::new());
    }

    let mut edges: Vec<f64> = match strategy {
        Discretizer::EqualWidth => {
            let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
            let width = (hi - lo) / bins as f64;
            (1..bins).map(|k| lo + width * k as f64).collect()
        }
        Discretizer::EqualFrequency | Discretizer::PassthroughIfIntegral => (1..bins)
            .map(|k| quantile_sorted(&sorted, k as f64 / bins as f64))
            .collect(),
    };
    edges.dedup();

    let raw: Vec<usize> = col
        .iter()
        .map(|v| edges.partition_point(|e| e < v))
        .collect();
    // Interpolated cut points can leave interior bins empty; re-densify and
    // keep only the edges that still separate occupied bins.
    let mut occupied = vec![false; edges.len() + 1];
    for &r in &raw {
        occupied[r] = true;
    }
    let mut remap = vec![0u32; occupied.len()];
    let mut kept = Vec::new();
    let mut next = 0u32;
    for (r, &occ) in occupied.iter().enumerate() {
        if occ {
            if next > 0 {
                kept.push(edges[r - 1]);
            }
            remap[r] = next;
            next += 1;
        }
    }
    let codes = raw.into_iter().map(|r| remap[r]).collect();
    (codes, next, kept)
}

/// Linear-interpolation quantile of sorted data.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}
