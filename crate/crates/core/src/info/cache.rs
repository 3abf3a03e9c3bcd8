use std::sync::OnceLock;

use rayon::prelude::*;

use super::{cmi_from_entropies, entropy_of_counts, RowPartition};
use crate::dataset::CodedMatrix;

/// Pairwise `I(f_i; f_j)` and `I(f_i; f_j | Y)` for one feature pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairInfo {
    pub mi: f64,
    pub cmi: f64,
}

/// Largest contingency table (feature × feature × class) counted densely.
const DENSE_CELLS: usize = 1 << 22;

/// Lazily filled table of pairwise information between the columns of a
/// [`CodedMatrix`], conditioned on a fixed target.
///
/// Storage is by row: the first request involving a selected feature fills
/// its whole row against every column. Each cell is computed from the pair in
/// canonical `(min, max)` order, so `get(i, j)` and `get(j, i)` agree exactly
/// whichever row served them. Fills are idempotent and safe to race.
pub struct PairCache<'a> {
    coded: &'a CodedMatrix,
    target: &'a [u32],
    n_classes: usize,
    target_entropy: f64,
    single: Vec<f64>,
    with_target: Vec<f64>,
    rows: Vec<OnceLock<Box<[PairInfo]>>>,
}

impl<'a> PairCache<'a> {
    /// `target` must hold dense class codes and match the matrix row count.
    pub fn new(coded: &'a CodedMatrix, target: &'a [u32]) -> Self {
        assert_eq!(coded.n_rows(), target.len(), "target length must match rows");
        let n_classes = target.iter().max().map_or(0, |&m| m as usize + 1);
        let py = RowPartition::from_column(target);
        let (single, with_target): (Vec<f64>, Vec<f64>) = (0..coded.n_columns())
            .into_par_iter()
            .map(|j| {
                let col = coded.column(j);
                let p = RowPartition::from_column(col);
                let pyj = py.refine(col).expect("lengths checked");
                (p.entropy(), pyj.entropy())
            })
            .unzip();
        Self {
            coded,
            target,
            n_classes,
            target_entropy: py.entropy(),
            single,
            with_target,
            rows: (0..coded.n_columns()).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn n_columns(&self) -> usize {
        self.coded.n_columns()
    }

    /// `H(f_j)`.
    pub fn entropy(&self, j: usize) -> f64 {
        self.single[j]
    }

    /// `H(f_j, Y)`.
    pub fn entropy_with_target(&self, j: usize) -> f64 {
        self.with_target[j]
    }

    /// `H(Y)`.
    pub fn target_entropy(&self) -> f64 {
        self.target_entropy
    }

    /// `I(f_j; Y) = H(f_j) + H(Y) - H(f_j, Y)`.
    pub fn relevance(&self, j: usize) -> f64 {
        (self.single[j] + self.target_entropy - self.with_target[j]).max(0.0)
    }

    pub fn is_filled(&self, i: usize) -> bool {
        self.rows[i].get().is_some()
    }

    /// Row `i` against every column, filled on first use.
    pub fn row(&self, i: usize) -> &[PairInfo] {
        self.rows[i].get_or_init(|| {
            (0..self.n_columns())
                .into_par_iter()
                .map(|j| self.compute(i, j))
                .collect::<Vec<_>>()
                .into_boxed_slice()
        })
    }

    /// Cached value if either row is filled, otherwise a direct computation
    /// (which does not fill anything).
    pub fn get(&self, i: usize, j: usize) -> PairInfo {
        if let Some(row) = self.rows[i].get() {
            return row[j];
        }
        if let Some(row) = self.rows[j].get() {
            return row[i];
        }
        self.compute(i, j)
    }

    fn compute(&self, i: usize, j: usize) -> PairInfo {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        let ca = self.coded.cardinalities[a] as usize;
        let cb = self.coded.cardinalities[b] as usize;
        let cells = ca * cb * self.n_classes.max(1);
        let (h_ab, h_aby) = if cells <= DENSE_CELLS {
            self.joint_dense(a, b, cb)
        } else {
            let pab = RowPartition::from_column(self.coded.column(a))
                .refine(self.coded.column(b))
                .expect("lengths checked");
            let paby = pab.refine(self.target).expect("lengths checked");
            (pab.entropy(), paby.entropy())
        };
        let mi = (self.single[a] + self.single[b] - h_ab).max(0.0);
        let cmi = cmi_from_entropies(self.with_target[a], self.with_target[b], h_aby, self.target_entropy);
        PairInfo { mi, cmi }
    }

    /// `(H(a,b), H(a,b,Y))` from a dense contingency table.
    fn joint_dense(&self, a: usize, b: usize, cb: usize) -> (f64, f64) {
        let c = self.n_classes.max(1);
        let n = self.target.len();
        let mut counts = vec![0usize; self.coded.cardinalities[a] as usize * cb * c];
        for ((&x, &y), &t) in self
            .coded
            .column(a)
            .iter()
            .zip(self.coded.column(b))
            .zip(self.target)
        {
            counts[(x as usize * cb + y as usize) * c + t as usize] += 1;
        }
        let pair: Vec<usize> = counts.chunks(c).map(|k| k.iter().sum()).collect();
        (entropy_of_counts(&pair, n), entropy_of_counts(&counts, n))
    }
}
