use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, Manifest};
use crate::error::{Error, Result, StageContext};
use crate::meta::{evaluate, fine_tune, meta_train, multitask_train, RunLog, TrainedModel};
use crate::tasks::{SplitDataset, TaskId};

/// How the model handed to fine-tuning is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    /// Meta-training with the configured sampler.
    #[serde(rename = "meta")]
    Meta,
    /// Random initialization only.
    #[serde(rename = "plain")]
    Plain,
    /// Joint multi-task training over all five tasks.
    #[serde(rename = "multitask")]
    MultiTask,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Method::Meta => "meta",
            Method::Plain => "plain",
            Method::MultiTask => "multitask",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "meta" => Ok(Method::Meta),
            "plain" => Ok(Method::Plain),
            "multitask" | "multi-task" => Ok(Method::MultiTask),
            other => Err(Error::InvalidConfig(format!("unknown method `{other}`"))),
        }
    }
}

pub struct PipelineResult {
    pub data: SplitDataset,
    /// Model handed to fine-tuning.
    pub initial: TrainedModel,
    /// Fine-tuned model used for inference.
    pub model: TrainedModel,
    pub log: Option<RunLog>,
    pub best_validation_auc: f64,
    pub test_auc: f64,
}

/// Builds the fine-tuning starting point for `method`.
pub fn initial_model(
    config: &ExperimentConfig,
    method: Method,
    data: &SplitDataset,
) -> Result<(TrainedModel, Option<RunLog>)> {
    let arch = config.architecture()?;
    let init = TrainedModel::initialized(arch, config.meta.seed);
    match method {
        Method::Plain => Ok((init, None)),
        Method::Meta => {
            let out = meta_train(init, &config.meta, &TaskId::ALL, data).stage("meta-train")?;
            Ok((out.model, Some(out.log)))
        }
        Method::MultiTask => {
            let out = multitask_train(
                &init,
                &TaskId::ALL,
                data,
                &config.multitask,
                config.meta.seed,
            )
            .stage("multi-task")?;
            Ok((out.screening, None))
        }
    }
}

/// Generate data, build the starting model, fine-tune on the screening task,
/// and score the test split.
pub fn run_pipeline(config: &ExperimentConfig, method: Method) -> Result<PipelineResult> {
    config.validate().stage("config")?;
    let data = config.source.generate(config.data_seed).stage("generate")?;
    let (initial, log) = initial_model(config, method, &data)?;
    let tuned = fine_tune(
        initial.clone(),
        TaskId::TARGET,
        &data,
        &config.fine_tune,
        config.meta.seed,
    )
    .stage("fine-tune")?;
    let best_validation_auc = tuned.validation_auc[tuned.best_epoch];
    let test_auc = evaluate(&tuned.model, TaskId::TARGET, &data).stage("evaluate")?;
    Ok(PipelineResult {
        data,
        initial,
        model: tuned.model,
        log,
        best_validation_auc,
        test_auc,
    })
}

/// Summary of one run, written as `result.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub method: Method,
    pub data_seed: u64,
    pub seed: u64,
    pub best_validation_auc: f64,
    pub test_auc: f64,
}

impl PipelineResult {
    pub fn record(&self, config: &ExperimentConfig, method: Method) -> RunRecord {
        RunRecord {
            method,
            data_seed: config.data_seed,
            seed: config.meta.seed,
            best_validation_auc: self.best_validation_auc,
            test_auc: self.test_auc,
        }
    }

    /// Writes checkpoint, run log, result record, config and manifest into `dir`.
    pub fn write_artifacts(
        &self,
        dir: &Path,
        config: &ExperimentConfig,
        method: Method,
        command: &str,
    ) -> Result<Manifest> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut manifest = Manifest::new(command, config);
        manifest.write_file(dir, "config.toml", &config.to_toml())?;
        manifest.write_file(dir, "initial.toml", &self.initial.to_checkpoint())?;
        manifest.write_file(dir, "checkpoint.toml", &self.model.to_checkpoint())?;
        if let Some(log) = &self.log {
            manifest.write_file(dir, "run_log.tsv", &log.to_tsv())?;
        }
        let record =
            serde_json::to_string_pretty(&self.record(config, method)).expect("record serializes");
        manifest.write_file(dir, "result.json", &record)?;
        manifest.save(dir)?;
        Ok(manifest)
    }
}
