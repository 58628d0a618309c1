use rand::seq::SliceRandom;

use super::{infer, FineTuneConfig, ProvenanceEntry, TrainedModel};
use crate::error::{Error, Result};
use crate::metrics::{compute_auc, ScoredLabels};
use crate::numerics::{grad, Architecture, Batch, ParamVector};
use crate::rng::{self, stream};
use crate::tasks::{map_labels, SplitDataset, TaskId};

pub struct FineTuneOutput {
    pub model: TrainedModel,
    /// Validation AUC after each epoch; entry 0 is the starting point.
    pub validation_auc: Vec<f64>,
    pub best_epoch: usize,
}

pub fn batch_auc(arch: &Architecture, params: &ParamVector, batch: &Batch) -> Result<f64> {
    let scores = infer(arch, params, batch.inputs())?;
    compute_auc(&ScoredLabels::new(&scores, batch.labels())?)
}

/// Mini-batch gradient descent on the target task's training data.
///
/// Returns the parameters with the highest validation AUC seen after any
/// epoch, including the starting parameters. Later epochs replace the
/// snapshot only on a strict improvement.
pub fn fine_tune(
    model: TrainedModel,
    target: TaskId,
    data: &SplitDataset,
    config: &FineTuneConfig,
    seed: u64,
) -> Result<FineTuneOutput> {
    config.validate()?;
    let def = target.definition();
    let train = map_labels(&def, &data.train)?;
    let validation = map_labels(&def, &data.validation)?;
    let arch = &model.arch;

    let mut rng = rng::stream_rng(seed, stream::FINE_TUNE);
    let mut params = model.params.clone();
    let mut best = params.clone();
    let mut best_auc = batch_auc(arch, &params, &validation)?;
    let mut best_epoch = 0;
    let mut history = Vec::with_capacity(config.epochs + 1);
    history.push(best_auc);

    let mut order: Vec<usize> = (0..train.len()).collect();
    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(config.batch_size) {
            let g = grad(arch, &params, &train.select(chunk)?)?;
            params.axpy(-config.learning_rate, &g);
        }
        if !params.is_finite() {
            return Err(Error::NonFinite("fine-tuning"));
        }
        let auc = batch_auc(arch, &params, &validation)?;
        history.push(auc);
        if auc > best_auc {
            best_auc = auc;
            best = params.clone();
            best_epoch = epoch;
        }
    }

    let config_json = serde_json::json!({
        "target": target.to_string(),
        "learning_rate": config.learning_rate,
        "batch_size": config.batch_size,
        "epochs": config.epochs,
        "best_epoch": best_epoch,
    })
    .to_string();
    let model = TrainedModel {
        arch: model.arch.clone(),
        params: best,
        provenance: model.provenance,
    }
    .with_stage(ProvenanceEntry {
        stage: "fine-tune".into(),
        seed,
        config: config_json,
        log_sha256: None,
    });
    Ok(FineTuneOutput {
        model,
        validation_auc: history,
        best_epoch,
    })
}

/// AUC of the model on the target task's test split.
pub fn evaluate(model: &TrainedModel, target: TaskId, data: &SplitDataset) -> Result<f64> {
    let test = map_labels(&target.definition(), &data.test)?;
    batch_auc(&model.arch, &model.params, &test)
}
