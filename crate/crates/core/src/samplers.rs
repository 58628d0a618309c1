//! Task selection for meta-batches.
//!
//! * `Random`: uniform draws with replacement.
//! * `AllTask`: every task of the pool once; the meta-batch must match the pool size.
//! * `Cl` (teacher-student curriculum): each task keeps its last `B` rewards,
//!   the change in AUC improvement since the task was last visited. One entry
//!   is drawn uniformly from each buffer and the task with the largest
//!   absolute draw wins.
//! * `Mab`: as `Cl`, but buffers hold the observations themselves and the
//!   largest signed draw wins.
//!
//! Tasks whose buffer is still empty are selected first, lowest index first.
//! Meta-batches larger than one repeat the single-task rule, and a task
//! picked for exploration earlier in the same batch is not picked for
//! exploration again. Ties go to the lowest task index.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics;
use crate::rng::{self, Rng};
use crate::tasks::TaskId;

pub const DEFAULT_BUFFER_CAPACITY: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SamplerKind {
    #[serde(rename = "random")]
    Random,
    #[serde(rename = "alltask")]
    AllTask,
    #[serde(rename = "mab")]
    Mab,
    #[serde(rename = "cl")]
    Cl,
}

impl SamplerKind {
    /// Column order of the results table.
    pub const ALL: [SamplerKind; 4] = [
        SamplerKind::Random,
        SamplerKind::AllTask,
        SamplerKind::Mab,
        SamplerKind::Cl,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SamplerKind::Random => "random",
            SamplerKind::AllTask => "alltask",
            SamplerKind::Mab => "mab",
            SamplerKind::Cl => "cl",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            SamplerKind::Random => "Random",
            SamplerKind::AllTask => "All-task",
            SamplerKind::Mab => "MAB",
            SamplerKind::Cl => "CL",
        }
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "random" => Ok(SamplerKind::Random),
            "alltask" | "all-task" => Ok(SamplerKind::AllTask),
            "mab" => Ok(SamplerKind::Mab),
            "cl" => Ok(SamplerKind::Cl),
            other => Err(Error::InvalidConfig(format!("unknown sampler `{other}`"))),
        }
    }
}

/// Tasks processed by one meta-update.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetaBatch {
    pub tasks: Vec<TaskId>,
}

/// What one recorded outcome did to the sampler.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Outcome {
    pub task: TaskId,
    pub observation: f64,
    /// Observation minus the task's previous observation (0 before the first visit).
    pub reward: f64,
    /// Value pushed into the task's buffer, if this sampler keeps buffers.
    pub buffered: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct SamplerState {
    kind: SamplerKind,
    capacity: usize,
    buffers: [VecDeque<f64>; 5],
    last_observation: [Option<f64>; 5],
    rng: Rng,
}

impl SamplerState {
    pub fn new(kind: SamplerKind, capacity: usize, rng: Rng) -> Self {
        assert!(capacity > 0, "buffer capacity must be positive");
        SamplerState {
            kind,
            capacity,
            buffers: Default::default(),
            last_observation: [None; 5],
            rng,
        }
    }

    pub fn with_seed(kind: SamplerKind, capacity: usize, seed: u64) -> Self {
        SamplerState::new(kind, capacity, rng::stream_rng(seed, rng::stream::SAMPLER))
    }

    pub fn kind(&self) -> SamplerKind {
        self.kind
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn buffer(&self, task: TaskId) -> &VecDeque<f64> {
        &self.buffers[task.index()]
    }

    pub fn last_observation(&self, task: TaskId) -> Option<f64> {
        self.last_observation[task.index()]
    }

    /// Replaces a buffer's contents, keeping only the newest `capacity` values.
    /// Used to script sampler scenarios.
    pub fn set_buffer(&mut self, task: TaskId, values: &[f64]) {
        let buf = &mut self.buffers[task.index()];
        buf.clear();
        for &v in values {
            push_bounded(buf, self.capacity, v);
        }
    }

    pub fn select_batch(&mut self, pool: &[TaskId], batch_size: usize) -> Result<MetaBatch> {
        if pool.is_empty() {
            return Err(Error::EmptyTaskPool);
        }
        if batch_size == 0 {
            return Err(Error::InvalidConfig(
                "meta-batch size must be positive".into(),
            ));
        }
        let tasks = match self.kind {
            SamplerKind::Random => (0..batch_size)
                .map(|_| pool[self.rng.random_range(0..pool.len())])
                .collect(),
            SamplerKind::AllTask => {
                if batch_size != pool.len() {
                    return Err(Error::AllTaskBatchSize {
                        pool: pool.len(),
                        requested: batch_size,
                    });
                }
                pool.to_vec()
            }
            SamplerKind::Cl | SamplerKind::Mab => {
                let absolute = self.kind == SamplerKind::Cl;
                let mut tasks = Vec::with_capacity(batch_size);
                for _ in 0..batch_size {
                    let t = self.select_one(pool, &tasks, absolute);
                    tasks.push(t);
                }
                tasks
            }
        };
        Ok(MetaBatch { tasks })
    }

    /// Single curriculum selection: largest absolute drawn reward.
    pub fn select_one_cl(&mut self, pool: &[TaskId]) -> Result<TaskId> {
        if pool.is_empty() {
            return Err(Error::EmptyTaskPool);
        }
        Ok(self.select_one(pool, &[], true))
    }

    /// Single bandit selection: largest signed drawn observation.
    pub fn select_one_mab(&mut self, pool: &[TaskId]) -> Result<TaskId> {
        if pool.is_empty() {
            return Err(Error::EmptyTaskPool);
        }
        Ok(self.select_one(pool, &[], false))
    }

    fn select_one(&mut self, pool: &[TaskId], pending: &[TaskId], absolute: bool) -> TaskId {
        let unexplored = pool
            .iter()
            .copied()
            .filter(|t| self.buffers[t.index()].is_empty() && !pending.contains(t))
            .min();
        if let Some(task) = unexplored {
            return task;
        }
        let mut best: Option<(f64, TaskId)> = None;
        for &task in pool {
            let buf = &self.buffers[task.index()];
            if buf.is_empty() {
                continue;
            }
            let drawn = buf[self.rng.random_range(0..buf.len())];
            let score = if absolute { drawn.abs() } else { drawn };
            best = match best {
                Some((s, t)) if s > score || (s == score && t < task) => Some((s, t)),
                _ => Some((score, task)),
            };
        }
        match best {
            Some((_, task)) => task,
            // Every pool task is empty and already pending in this batch.
            None => pool.iter().copied().min().unwrap(),
        }
    }

    /// Records the query AUC before and after adapting to `task`.
    pub fn record_outcome(
        &mut self,
        task: TaskId,
        auc_before: f64,
        auc_after: f64,
    ) -> Result<Outcome> {
        let o = metrics::observation(auc_after, auc_before)?;
        Ok(self.record_observation(task, o.value()))
    }

    /// Records a raw improvement signal for `task`.
    pub fn record_observation(&mut self, task: TaskId, observation: f64) -> Outcome {
        let i = task.index();
        let previous = self.last_observation[i].unwrap_or(0.0);
        let reward = observation - previous;
        self.last_observation[i] = Some(observation);
        let buffered = match self.kind {
            SamplerKind::Cl => Some(reward),
            SamplerKind::Mab => Some(observation),
            SamplerKind::Random | SamplerKind::AllTask => None,
        };
        if let Some(v) = buffered {
            push_bounded(&mut self.buffers[i], self.capacity, v);
        }
        Outcome {
            task,
            observation,
            reward,
            buffered,
        }
    }
}

fn push_bounded(buf: &mut VecDeque<f64>, capacity: usize, value: f64) {
    if buf.len() == capacity {
        buf.pop_front();
    }
    buf.push_back(value);
}
