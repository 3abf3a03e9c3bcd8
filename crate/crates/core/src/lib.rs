//! Semantic-preserving feature partitioning (SPFP).
//!
//! The crate decomposes the feature set of a tabular classification dataset
//! into several *views*, each of which carries the same empirical information
//! content as the full feature set, and provides the surrounding evaluation
//! machinery:
//!
//! - [`dataset`]: CSV loading, target encoding, discretization and splits.
//! - [`info`]: plug-in entropy, mutual information and friends, plus the
//!   [`info::RowPartition`] used for incremental joint entropies.
//! - [`spfp`]: the greedy view construction and view diagnostics.
//! - [`ensemble`]: per-view baseline models, AUC-weighted ensembles, metrics.
//! - [`stats`]: Friedman / Conover tests, p-value adjustment, Cliff's delta.
//! - [`cli`]: the `spfp` command-line driver.
//!
//! All information quantities are in bits.

pub mod cli;
pub mod dataset;
pub mod ensemble;
pub mod info;
pub mod rng;
pub mod spfp;
pub mod stats;

pub use dataset::{CodedMatrix, Dataset, Discretizer, SplitSpec};
pub use info::{PairCache, RowPartition};
pub use spfp::{SpfpConfig, Termination, View, ViewSet};

/// Version tag written into every JSON artifact.
pub const FORMAT_VERSION: &str = "1.0";
