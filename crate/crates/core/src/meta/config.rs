use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::samplers::{SamplerKind, DEFAULT_BUFFER_CAPACITY};
use crate::tasks::TaskId;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GradientMode {
    /// Differentiate through every inner step.
    #[default]
    #[serde(rename = "second")]
    SecondOrder,
    /// Treat the adapted parameters as a constant shift of the initialization.
    #[serde(rename = "first")]
    FirstOrder,
}

impl fmt::Display for GradientMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GradientMode::SecondOrder => "second",
            GradientMode::FirstOrder => "first",
        })
    }
}

impl FromStr for GradientMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "second" | "second-order" => Ok(GradientMode::SecondOrder),
            "first" | "first-order" => Ok(GradientMode::FirstOrder),
            other => Err(Error::InvalidConfig(format!(
                "unknown gradient mode `{other}`"
            ))),
        }
    }
}

/// Hyperparameters of the meta-training phase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetaConfig {
    /// Inner-loop step size.
    pub adaptation_rate: f64,
    /// Outer-loop step size.
    pub meta_rate: f64,
    pub meta_updates: usize,
    pub inner_steps: usize,
    pub n_tr: usize,
    pub n_val: usize,
    pub meta_batch_size: usize,
    pub sampler: SamplerKind,
    pub gradient_mode: GradientMode,
    /// Leave the screening task out of meta-training.
    pub exclude_target_task: bool,
    pub buffer_capacity: usize,
    pub seed: u64,
}

impl Default for MetaConfig {
    fn default() -> Self {
        MetaConfig {
            adaptation_rate: 0.1,
            meta_rate: 0.001,
            meta_updates: 3000,
            inner_steps: 5,
            n_tr: 4,
            n_val: 4,
            meta_batch_size: 5,
            sampler: SamplerKind::Cl,
            gradient_mode: GradientMode::SecondOrder,
            exclude_target_task: false,
            buffer_capacity: DEFAULT_BUFFER_CAPACITY,
            seed: 0,
        }
    }
}

impl MetaConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        positive("adaptation_rate", self.adaptation_rate)?;
        // Zero disables the meta-update; used to isolate sampler behaviour.
        if !(self.meta_rate >= 0.0 && self.meta_rate.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "meta_rate must be non-negative, got {}",
                self.meta_rate
            )));
        }
        for (name, v) in [
            ("inner_steps", self.inner_steps),
            ("n_tr", self.n_tr),
            ("n_val", self.n_val),
            ("meta_batch_size", self.meta_batch_size),
            ("buffer_capacity", self.buffer_capacity),
        ] {
            if v == 0 {
                return Err(Error::InvalidConfig(format!("{name} must be positive")));
            }
        }
        Ok(())
    }

    /// Tasks available to meta-training.
    pub fn task_pool(&self) -> Vec<TaskId> {
        TaskId::ALL
            .into_iter()
            .filter(|&t| !(self.exclude_target_task && t == TaskId::TARGET))
            .collect()
    }
}

/// Hyperparameters of the supervised training phase on the target task.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FineTuneConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
}

impl Default for FineTuneConfig {
    fn default() -> Self {
        FineTuneConfig {
            learning_rate: 0.01,
            batch_size: 2,
            epochs: 200,
        }
    }
}

impl FineTuneConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch_size must be positive".into()));
        }
        Ok(())
    }
}

/// Hyperparameters of the joint multi-task baseline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MultiTaskConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub iterations: usize,
}

impl Default for MultiTaskConfig {
    fn default() -> Self {
        MultiTaskConfig {
            learning_rate: 0.01,
            batch_size: 4,
            iterations: 2000,
        }
    }
}
