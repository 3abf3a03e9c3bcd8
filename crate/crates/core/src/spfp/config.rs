use serde::{Deserialize, Serialize};

use super::SpfpError;
use crate::dataset::Discretizer;

/// Minimum view size, either absolute or relative to the feature count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MinFeatures {
    Count(usize),
    Fraction(f64),
}

impl MinFeatures {
    /// Resolved count. A fraction resolves to `ceil(fraction * n_features)`,
    /// and never below 1.
    pub fn resolve(&self, n_features: usize) -> usize {
        match *self {
            MinFeatures::Count(c) => c.max(1),
            // The small epsilon keeps e.g. 0.1 * 170 = 17.000000000000004 at 17.
            MinFeatures::Fraction(f) => ((f * n_features as f64 - 1e-9).ceil() as usize).max(1),
        }
    }
}

/// Target encoding used by the correlation term of the score.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelevanceCorrelation {
    /// Correlate with the integer class codes.
    #[default]
    ClassCode,
    /// Maximum correlation over one-vs-rest class indicators.
    MaxOvr,
}

impl std::str::FromStr for RelevanceCorrelation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "class_code" => Ok(Self::ClassCode),
            "max_ovr" => Ok(Self::MaxOvr),
            other => Err(format!("unknown relevance correlation '{other}' (class_code, max_ovr)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpfpConfig {
    pub n_views: usize,
    pub min_features: MinFeatures,
    pub remove_fraction: f64,
    /// Relative tolerance for the entropy-matching criteria.
    pub entropy_tolerance: f64,
    pub seed: u64,
    pub bins: usize,
    pub discretizer: Discretizer,
    #[serde(default)]
    pub relevance_correlation: RelevanceCorrelation,
}

impl Default for SpfpConfig {
    fn default() -> Self {
        Self {
            n_views: 5,
            min_features: MinFeatures::Fraction(0.1),
            remove_fraction: 0.6,
            entropy_tolerance: 1e-9,
            seed: 0,
            bins: 10,
            discretizer: Discretizer::EqualFrequency,
            relevance_correlation: RelevanceCorrelation::ClassCode,
        }
    }
}

impl SpfpConfig {
    pub fn validate(&self) -> Result<(), SpfpError> {
        let bad = |field: &'static str, reason: String| Err(SpfpError::Config { field, reason });
        if self.n_views == 0 {
            return bad("n_views", "must be at least 1".into());
        }
        match self.min_features {
            MinFeatures::Fraction(f) if !(f > 0.0 && f <= 1.0) => {
                return bad("min_features", format!("fraction {f} outside (0, 1]"));
            }
            MinFeatures::Count(0) => return bad("min_features", "count must be at least 1".into()),
            _ => {}
        }
        if !(0.0..=1.0).contains(&self.remove_fraction) {
            return bad("remove_fraction", format!("{} outside [0, 1]", self.remove_fraction));
        }
        if !(self.entropy_tolerance > 0.0 && self.entropy_tolerance.is_finite()) {
            return bad("entropy_tolerance", "must be positive".into());
        }
        if self.bins < 2 {
            return bad("bins", "must be at least 2".into());
        }
        Ok(())
    }
}
