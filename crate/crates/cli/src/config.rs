use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};
use specflow::roof::RoofDescriptor;
use specflow::rotations::RotationDescriptor;
use std::fmt;
use std::path::{Path, PathBuf};

/// One experiment. Subcommand flags are folded into `params` before the operation runs,
/// so the summary always records the configuration that actually produced the output.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<RotationDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roof: Option<RoofDescriptor>,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision_bits: Option<u32>,
    #[serde(default)]
    pub output: OutputPaths,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    /// File stem for the CSV, JSON and plot script; defaults to the operation name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stem: Option<String>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
    }

    /// Command-line values win over the file; nulls mean "not given".
    pub fn overlay_params(&mut self, overlay: Value) {
        if let Value::Object(m) = overlay {
            for (k, v) in m {
                if !v.is_null() {
                    self.params.insert(k, v);
                }
            }
        }
    }

    /// SHA-256 of the canonical JSON form, ignoring where the output goes.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output = OutputPaths::default();
        let bytes = serde_json::to_vec(&c).expect("config serialises");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Exit codes: 1 for failed assertions and certificates, 2 for bad input, 3 for precision.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Precision(String),
    Certification(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Certification(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Precision(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Precision(m) => write!(f, "insufficient precision: {m}"),
            CliError::Certification(m) => write!(f, "certification failed: {m}"),
        }
    }
}

impl From<specflow::Error> for CliError {
    fn from(e: specflow::Error) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else if e.is_precision() {
            CliError::Precision(e.to_string())
        } else {
            CliError::Certification(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Validation(format!("output: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Validation(format!("output: {e}"))
    }
}
