use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::ensemble::{ClassifierKind, EnsembleConfig};
use crate::generator::parse_scenario;
use crate::tree::TreeConfig;

/// One experiment: every scenario x classifier x seed combination.
///
/// Read from a TOML file of `key = value` lines:
///
/// ```toml
/// scenarios = ["StaticIm10", "Rare80"]
/// classifiers = ["ob", "oob", "uob", "noob", "nuob", "hnob"]
/// seeds = [1, 2, 3]
/// stream_length = 50000
/// output_dir = "out/rare"
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenarios: Vec<String>,
    pub classifiers: Vec<ClassifierKind>,
    pub seeds: Vec<u64>,
    pub stream_length: u64,
    pub ensemble_size: usize,
    pub k: usize,
    pub window: usize,
    pub psi: f64,
    pub theta: f64,
    pub output_dir: PathBuf,
    /// Write one series CSV per run.
    pub write_series: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            scenarios: Vec::new(),
            classifiers: ClassifierKind::ALL.to_vec(),
            seeds: (1..=10).collect(),
            stream_length: crate::generator::scenario::DEFAULT_LENGTH,
            ensemble_size: 15,
            k: 5,
            window: 500,
            psi: 2.0,
            theta: 0.9,
            output_dir: PathBuf::from("out"),
            write_series: true,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ExperimentError> {
        toml::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ExperimentError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn ensemble_config(&self) -> EnsembleConfig {
        EnsembleConfig {
            ensemble_size: self.ensemble_size,
            k: self.k,
            window: self.window,
            psi: self.psi,
            theta: self.theta,
            tree: TreeConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: &str| Err(ExperimentError::Config(m.to_string()));
        if self.scenarios.is_empty() {
            return bad("`scenarios` must not be empty");
        }
        if self.classifiers.is_empty() {
            return bad("`classifiers` must not be empty");
        }
        if self.seeds.is_empty() {
            return bad("`seeds` must not be empty");
        }
        if self.stream_length == 0 || self.ensemble_size == 0 || self.k == 0 || self.window == 0 {
            return bad("stream_length, ensemble_size, k and window must be positive");
        }
        if self.k > self.window {
            return bad("k must not exceed window");
        }
        if !(self.psi > 0.0 && self.psi.is_finite()) {
            return bad("psi must be positive");
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return bad("theta must lie in (0, 1)");
        }
        for s in &self.scenarios {
            parse_scenario(s).map_err(ExperimentError::Scenario)?;
        }
        Ok(())
    }
}
