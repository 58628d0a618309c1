use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::meta::{FineTuneConfig, MetaConfig, MultiTaskConfig};
use crate::numerics::{Activation, Architecture};
use crate::tasks::{generate_source, SourceConfig, SplitDataset};

/// Parameters of the synthetic cohort.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SourceSettings {
    pub dimension: usize,
    pub subjects: usize,
    pub samples_per_subject: usize,
    pub sigma: f64,
    /// Distance between the benign and malignant means.
    pub near: f64,
    /// Distance from the no-finding mean to either finding mean.
    pub far: f64,
}

impl Default for SourceSettings {
    fn default() -> Self {
        SourceSettings {
            dimension: 16,
            subjects: 117,
            samples_per_subject: 2,
            sigma: 1.0,
            near: 1.0,
            far: 3.0,
        }
    }
}

impl SourceSettings {
    pub fn source_config(&self, seed: u64) -> Result<SourceConfig> {
        SourceConfig::with_geometry(self.dimension, self.near, self.far, self.sigma, seed)
    }

    pub fn generate(&self, seed: u64) -> Result<SplitDataset> {
        generate_source(
            &self.source_config(seed)?,
            self.subjects,
            self.samples_per_subject,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSettings {
    pub hidden: Vec<usize>,
    pub activation: Activation,
}

impl Default for ModelSettings {
    fn default() -> Self {
        ModelSettings {
            hidden: vec![32],
            activation: Activation::Relu,
        }
    }
}

impl ModelSettings {
    pub fn architecture(&self, input_dim: usize) -> Result<Architecture> {
        Architecture::classifier(input_dim, &self.hidden, self.activation)
    }
}

/// Everything needed to reproduce one pipeline run.
///
/// `meta.seed` seeds initialization, sampling, episodes and fine-tuning;
/// `data_seed` seeds the synthetic cohort.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub data_seed: u64,
    pub source: SourceSettings,
    pub model: ModelSettings,
    pub meta: MetaConfig,
    pub fine_tune: FineTuneConfig,
    pub multitask: MultiTaskConfig,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::parse(0, format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ExperimentConfig::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.meta.validate()?;
        self.fine_tune.validate()?;
        self.model.architecture(self.source.dimension)?;
        self.source.source_config(self.data_seed)?;
        Ok(())
    }

    pub fn architecture(&self) -> Result<Architecture> {
        self.model.architecture(self.source.dimension)
    }
}
