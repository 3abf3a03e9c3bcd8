use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::dataset::{MissingPolicy, SplitSpec};
use crate::ensemble::EvaluateConfig;
use crate::spfp::{SpfpConfig, SpfpError};
use crate::FORMAT_VERSION;

/// Everything a pipeline run depends on. Written into every artifact and
/// accepted back through `--config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub format_version: String,
    pub input: PathBuf,
    /// Header name, or a zero-based column index.
    pub target: String,
    #[serde(default)]
    pub missing: MissingPolicy,
    pub out: PathBuf,
    pub split: SplitSpec,
    pub spfp: SpfpConfig,
    pub model: EvaluateConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            format_version: FORMAT_VERSION.to_string(),
            input: PathBuf::new(),
            target: String::new(),
            missing: MissingPolicy::default(),
            out: PathBuf::from("spfp-out"),
            split: SplitSpec::default(),
            spfp: SpfpConfig::default(),
            model: EvaluateConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("--config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("--config {}: {e}", path.display())))
    }

    /// Checks everything that can be checked without reading the data.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.input.as_os_str().is_empty() {
            return Err(CliError::Config("--input is required".into()));
        }
        if self.target.is_empty() {
            return Err(CliError::Config("--target is required".into()));
        }
        let f = self.split.test_fraction;
        if !(f > 0.0 && f < 1.0) {
            return Err(CliError::Config(format!("invalid --test-frac: {f} outside (0, 1)")));
        }
        let v = self.model.validation_fraction;
        if !(0.0..1.0).contains(&v) {
            return Err(CliError::Config(format!("invalid --validation-frac: {v} outside [0, 1)")));
        }
        if !(self.model.logistic.l2 >= 0.0 && self.model.logistic.l2.is_finite()) {
            return Err(CliError::Config("invalid --l2: must be non-negative".into()));
        }
        self.spfp.validate().map_err(config_error)
    }
}

pub(crate) fn flag_for(field: &str) -> &str {
    match field {
        "n_views" => "--views",
        "min_features" => "--min-frac/--min-count",
        "remove_fraction" => "--remove-frac",
        "entropy_tolerance" => "--tolerance",
        "bins" => "--bins",
        other => other,
    }
}

pub(crate) fn config_error(e: SpfpError) -> CliError {
    match e {
        SpfpError::Config { field, reason } => {
            CliError::Config(format!("invalid {}: {reason}", flag_for(field)))
        }
        other => CliError::Config(other.to_string()),
    }
}
