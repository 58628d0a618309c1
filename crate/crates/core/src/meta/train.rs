use super::adapt::{adapt_episodes, sum_gradients};
use super::{infer, LogRecord, MetaConfig, ProvenanceEntry, RunLog, TrainedModel};
use crate::error::{Error, Result};
use crate::metrics::{compute_auc, ScoredLabels};
use crate::numerics::{Architecture, Batch, ParamVector};
use crate::rng::{self, stream};
use crate::samplers::SamplerState;
use crate::tasks::{sample_episode, Episode, SplitDataset, TaskId};

pub struct MetaTrainOutput {
    pub model: TrainedModel,
    pub log: RunLog,
}

fn query_auc(arch: &Architecture, params: &ParamVector, query: &Batch) -> Result<f64> {
    let scores = infer(arch, params, query.inputs())?;
    compute_auc(&ScoredLabels::new(&scores, query.labels())?)
}

/// Meta-trains `model` on episodes drawn from `data.train`.
///
/// Each of the `meta_updates` iterations selects a meta-batch, samples one
/// episode per slot, adapts to every episode, applies
/// `theta <- theta - meta_rate * sum_j meta_gradient_j`, and reports the
/// query AUC before and after adaptation to the sampler.
///
/// `pool` lists the tasks available for sampling; the screening task is
/// removed from it when `config.exclude_target_task` is set.
pub fn meta_train(
    model: TrainedModel,
    config: &MetaConfig,
    pool: &[TaskId],
    data: &SplitDataset,
) -> Result<MetaTrainOutput> {
    config.validate()?;
    let pool: Vec<TaskId> = pool
        .iter()
        .copied()
        .filter(|&t| !(config.exclude_target_task && t == TaskId::TARGET))
        .collect();
    if pool.is_empty() {
        return Err(Error::EmptyTaskPool);
    }
    let arch = model.arch.clone();
    let mut params = model.params.clone();
    let mut sampler = SamplerState::new(
        config.sampler,
        config.buffer_capacity,
        rng::stream_rng(config.seed, stream::SAMPLER),
    );
    let mut episode_rng = rng::stream_rng(config.seed, stream::EPISODES);
    let mut log = RunLog::default();

    for iteration in 0..config.meta_updates {
        let batch = sampler.select_batch(&pool, config.meta_batch_size)?;
        let episodes = batch
            .tasks
            .iter()
            .map(|&task| {
                sample_episode(
                    task,
                    &data.train,
                    config.n_tr,
                    config.n_val,
                    &mut episode_rng,
                )
            })
            .collect::<Result<Vec<Episode>>>()
            .map_err(|e| match e {
                Error::PoolExhausted { task, reason } => Error::PoolExhausted {
                    task,
                    reason: format!("meta-update {iteration}: {reason}"),
                },
                other => other,
            })?;

        let steps = adapt_episodes(
            &arch,
            &params,
            &episodes,
            config.adaptation_rate,
            config.inner_steps,
            config.gradient_mode,
        )?;
        let gradient = sum_gradients(params.len(), steps.iter().map(|s| &s.meta_gradient));

        let mut record = LogRecord {
            iteration,
            sampler: config.sampler,
            tasks: batch.tasks.clone(),
            auc_before: Vec::with_capacity(episodes.len()),
            auc_after: Vec::with_capacity(episodes.len()),
            observation: Vec::with_capacity(episodes.len()),
            reward: Vec::with_capacity(episodes.len()),
            query_loss: steps.iter().map(|s| s.query_loss).sum(),
            meta_grad_norm: gradient.norm(),
        };
        for (ep, step) in episodes.iter().zip(&steps) {
            let before = query_auc(&arch, &params, &ep.query)?;
            let after = query_auc(&arch, &step.adapted, &ep.query)?;
            let outcome = sampler.record_outcome(ep.task, before, after)?;
            record.auc_before.push(before);
            record.auc_after.push(after);
            record.observation.push(outcome.observation);
            record.reward.push(outcome.reward);
        }

        params.axpy(-config.meta_rate, &gradient);
        if !params.is_finite() {
            return Err(Error::NonFinite("meta-update"));
        }
        log.records.push(record);
    }

    let config_json = serde_json::to_string(config).expect("config serializes");
    let model = TrainedModel {
        arch,
        params,
        provenance: model.provenance,
    }
    .with_stage(ProvenanceEntry {
        stage: "meta-train".into(),
        seed: config.seed,
        config: config_json,
        log_sha256: Some(log.sha256()),
    });
    Ok(MetaTrainOutput { model, log })
}
