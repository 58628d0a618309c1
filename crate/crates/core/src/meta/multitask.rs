//! Joint training baseline: a shared trunk with one output layer per task.

use std::collections::BTreeMap;

use rand::seq::index;
use rand::Rng;

use super::{MultiTaskConfig, ProvenanceEntry, TrainedModel};
use crate::error::{Error, Result};
use crate::numerics::{grad, Architecture, Batch, ParamVector};
use crate::rng::{self, stream};
use crate::tasks::{map_labels, SplitDataset, TaskId};

#[derive(Clone, Debug, PartialEq)]
pub struct MultiTaskModel {
    pub arch: Architecture,
    /// Hidden layers, laid out as the leading part of a full parameter vector.
    pub trunk: Vec<f64>,
    /// Output layer per task.
    pub heads: BTreeMap<TaskId, Vec<f64>>,
}

impl MultiTaskModel {
    /// Every task starts from the head of `init`.
    pub fn from_single(arch: Architecture, init: &ParamVector, tasks: &[TaskId]) -> Result<Self> {
        init.check_len("multi-task initialization", arch.param_count())?;
        let split = arch.trunk_len();
        let (trunk, head) = init.as_slice().split_at(split);
        Ok(MultiTaskModel {
            heads: tasks.iter().map(|&t| (t, head.to_vec())).collect(),
            trunk: trunk.to_vec(),
            arch,
        })
    }

    /// Trunk plus the head of `task`, as a single-task parameter vector.
    pub fn classifier(&self, task: TaskId) -> Option<ParamVector> {
        self.heads.get(&task).map(|head| {
            let mut v = self.trunk.clone();
            v.extend_from_slice(head);
            ParamVector::new(v)
        })
    }
}

/// Trunk gradient and one head gradient per task.
pub type SplitGradient = (Vec<f64>, BTreeMap<TaskId, Vec<f64>>);

/// Gradient of the summed per-task losses.
pub fn multitask_gradient(
    model: &MultiTaskModel,
    batches: &[(TaskId, Batch)],
) -> Result<SplitGradient> {
    let split = model.arch.trunk_len();
    let mut trunk = vec![0.0; split];
    let mut heads: BTreeMap<TaskId, Vec<f64>> = BTreeMap::new();
    for (task, batch) in batches {
        let params = model
            .classifier(*task)
            .ok_or_else(|| Error::InvalidConfig(format!("no head for task {task}")))?;
        let g = grad(&model.arch, &params, batch)?;
        let (gt, gh) = g.as_slice().split_at(split);
        for (a, b) in trunk.iter_mut().zip(gt) {
            *a += b;
        }
        let head = heads.entry(*task).or_insert_with(|| vec![0.0; gh.len()]);
        for (a, b) in head.iter_mut().zip(gh) {
            *a += b;
        }
    }
    Ok((trunk, heads))
}

/// `size` distinct indices below `n` (all of them, shuffled, when `size >= n`).
pub fn minibatch_indices<R: Rng + ?Sized>(rng: &mut R, n: usize, size: usize) -> Vec<usize> {
    index::sample(rng, n, size.min(n)).into_vec()
}

pub struct MultiTaskOutput {
    pub model: MultiTaskModel,
    /// Trunk with the screening head, or with the first pool task's head
    /// when the screening task is not in the pool.
    pub screening: TrainedModel,
}

/// Each iteration draws one mini-batch per task (in pool order) and takes a
/// gradient step on the summed loss.
pub fn multitask_train(
    init: &TrainedModel,
    pool: &[TaskId],
    data: &SplitDataset,
    config: &MultiTaskConfig,
    seed: u64,
) -> Result<MultiTaskOutput> {
    if pool.is_empty() {
        return Err(Error::EmptyTaskPool);
    }
    if config.batch_size == 0 || config.learning_rate.is_nan() || config.learning_rate <= 0.0 {
        return Err(Error::InvalidConfig(
            "multi-task learning rate and batch size must be positive".into(),
        ));
    }
    let task_data = pool
        .iter()
        .map(|&t| map_labels(&t.definition(), &data.train).map(|b| (t, b)))
        .collect::<Result<Vec<_>>>()?;
    let mut model = MultiTaskModel::from_single(init.arch.clone(), &init.params, pool)?;
    let mut rng = rng::stream_rng(seed, stream::MULTITASK);

    for _ in 0..config.iterations {
        let batches = task_data
            .iter()
            .map(|(t, all)| {
                let idx = minibatch_indices(&mut rng, all.len(), config.batch_size);
                all.select(&idx).map(|b| (*t, b))
            })
            .collect::<Result<Vec<_>>>()?;
        let (gt, gh) = multitask_gradient(&model, &batches)?;
        for (p, g) in model.trunk.iter_mut().zip(&gt) {
            *p -= config.learning_rate * g;
        }
        for (task, g) in gh {
            let head = model.heads.get_mut(&task).unwrap();
            for (p, gi) in head.iter_mut().zip(&g) {
                *p -= config.learning_rate * gi;
            }
        }
    }

    let target = if pool.contains(&TaskId::TARGET) {
        TaskId::TARGET
    } else {
        pool[0]
    };
    let params = model.classifier(target).unwrap();
    if !params.is_finite() {
        return Err(Error::NonFinite("multi-task training"));
    }
    let tasks: Vec<String> = pool.iter().map(TaskId::to_string).collect();
    let screening = TrainedModel {
        arch: model.arch.clone(),
        params,
        provenance: init.provenance.clone(),
    }
    .with_stage(ProvenanceEntry {
        stage: "multi-task".into(),
        seed,
        config: serde_json::json!({
            "tasks": tasks,
            "learning_rate": config.learning_rate,
            "batch_size": config.batch_size,
            "iterations": config.iterations,
        })
        .to_string(),
        log_sha256: None,
    });
    Ok(MultiTaskOutput { model, screening })
}
