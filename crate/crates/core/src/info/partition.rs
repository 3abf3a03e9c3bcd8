use std::collections::HashMap;

use super::{entropy_of_counts, InfoError};

/// Rows grouped by their joint value over a set of coded columns.
///
/// Group ids are dense and assigned in order of first appearance, so two
/// partitions built from the same columns in the same order are identical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowPartition {
    group_id: Vec<u32>,
    group_sizes: Vec<usize>,
}

/// Above this many (group, code) cells, refinement switches from a dense
/// lookup table to hashing.
const DENSE_LIMIT: usize = 1 << 24;

impl RowPartition {
    /// One group holding all `n` rows (the empty feature set).
    pub fn trivial(n: usize) -> Self {
        Self {
            group_id: vec![0; n],
            group_sizes: if n == 0 { Vec::new() } else { vec![n] },
        }
    }

    /// Partition by a single column.
    pub fn from_column(column: &[u32]) -> Self {
        Self::trivial(column.len())
            .refine(column)
            .expect("lengths match by construction")
    }

    /// Partition by the joint value of several columns.
    pub fn from_columns<C: AsRef<[u32]>>(n: usize, columns: &[C]) -> Result<Self, InfoError> {
        let mut p = Self::trivial(n);
        for c in columns {
            p = p.refine(c.as_ref())?;
        }
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.group_id.len()
    }

    pub fn is_empty(&self) -> bool {
        self.group_id.is_empty()
    }

    pub fn n_groups(&self) -> usize {
        self.group_sizes.len()
    }

    pub fn group_ids(&self) -> &[u32] {
        &self.group_id
    }

    pub fn group_sizes(&self) -> &[usize] {
        &self.group_sizes
    }

    /// Intersects every group with the value classes of `column`.
    pub fn refine(&self, column: &[u32]) -> Result<Self, InfoError> {
        if column.len() != self.len() {
            return Err(InfoError::LengthMismatch {
                expected: self.len(),
                found: column.len(),
            });
        }
        let card = column.iter().max().map_or(0, |&m| m as usize + 1);
        let cells = self.n_groups().saturating_mul(card);
        let mut group_id = Vec::with_capacity(self.len());
        let mut group_sizes = Vec::new();
        if cells <= DENSE_LIMIT.max(4 * self.len()) {
            let mut table = vec![u32::MAX; cells];
            for (&g, &c) in self.group_id.iter().zip(column) {
                let slot = &mut table[g as usize * card + c as usize];
                if *slot == u32::MAX {
                    *slot = group_sizes.len() as u32;
                    group_sizes.push(0);
                }
                group_sizes[*slot as usize] += 1;
                group_id.push(*slot);
            }
        } else {
            let mut table: HashMap<(u32, u32), u32> = HashMap::new();
            for (&g, &c) in self.group_id.iter().zip(column) {
                let next = group_sizes.len() as u32;
                let id = *table.entry((g, c)).or_insert(next);
                if id == next {
                    group_sizes.push(0);
                }
                group_sizes[id as usize] += 1;
                group_id.push(id);
            }
        }
        Ok(Self {
            group_id,
            group_sizes,
        })
    }

    /// Plug-in entropy of the group-size distribution, in bits.
    pub fn entropy(&self) -> f64 {
        entropy_of_counts(&self.group_sizes, self.len())
    }
}
