use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{SourceSample, TaskDefinition, TaskId};
use crate::error::{Error, Result};
use crate::numerics::{Batch, Matrix};

/// A source sample that takes part in a task, with its binary label.
#[derive(Clone, Copy, Debug)]
pub struct LabeledSample<'a> {
    pub sample: &'a SourceSample,
    pub label: u8,
}

/// Samples of `samples` whose class belongs to the task, in input order.
pub fn eligible<'a>(task: &TaskDefinition, samples: &'a [SourceSample]) -> Vec<LabeledSample<'a>> {
    samples
        .iter()
        .filter_map(|sample| {
            task.label(sample.class)
                .map(|label| LabeledSample { sample, label })
        })
        .collect()
}

fn to_batch(items: &[LabeledSample<'_>], dimension: usize) -> Result<Batch> {
    let mut data = Vec::with_capacity(items.len() * dimension);
    for item in items {
        if item.sample.features.len() != dimension {
            return Err(Error::DimensionMismatch {
                context: "sample features",
                expected: dimension,
                found: item.sample.features.len(),
            });
        }
        data.extend_from_slice(&item.sample.features);
    }
    Batch::new(
        Matrix::new(items.len(), dimension, data)?,
        items.iter().map(|i| i.label).collect(),
    )
}

/// Drops samples outside the task and labels the rest.
///
/// Returns [`Error::EmptyBatch`] when no sample is eligible.
pub fn map_labels(task: &TaskDefinition, samples: &[SourceSample]) -> Result<Batch> {
    let items = eligible(task, samples);
    let dimension = items
        .first()
        .map(|i| i.sample.features.len())
        .ok_or(Error::EmptyBatch("map_labels"))?;
    to_batch(&items, dimension)
}

/// Support and query sets for one adaptation.
#[derive(Clone, Debug)]
pub struct Episode {
    pub task: TaskId,
    pub support: Batch,
    pub query: Batch,
    pub support_subjects: Vec<u64>,
    pub query_subjects: Vec<u64>,
}

/// Stratified, subject-disjoint draw of `n_tr` support and `n_val` query samples.
///
/// Both sets receive at least one positive and one negative; no subject
/// contributes to both.
pub fn sample_episode<R: Rng + ?Sized>(
    task: TaskId,
    pool: &[SourceSample],
    n_tr: usize,
    n_val: usize,
    rng: &mut R,
) -> Result<Episode> {
    let exhausted = |reason: String| Error::PoolExhausted { task, reason };
    if n_tr < 2 || n_val < 2 {
        return Err(Error::InvalidConfig(format!(
            "support and query need at least 2 samples each, got {n_tr} and {n_val}"
        )));
    }
    let def = task.definition();
    let mut items = eligible(&def, pool);
    if items.len() < n_tr + n_val {
        return Err(exhausted(format!(
            "{} eligible samples, need {}",
            items.len(),
            n_tr + n_val
        )));
    }
    items.shuffle(rng);

    let mut used = vec![false; items.len()];
    let mut support: Vec<usize> = Vec::with_capacity(n_tr);
    let mut query: Vec<usize> = Vec::with_capacity(n_val);
    let mut support_subjects = BTreeSet::new();
    let mut query_subjects = BTreeSet::new();

    let pick =
        |label: Option<u8>, used: &mut Vec<bool>, forbidden: &BTreeSet<u64>| -> Option<usize> {
            let idx = (0..items.len()).find(|&i| {
                !used[i]
                    && label.is_none_or(|l| items[i].label == l)
                    && !forbidden.contains(&items[i].sample.subject_id)
            })?;
            used[idx] = true;
            Some(idx)
        };

    for label in [1u8, 0] {
        let i = pick(Some(label), &mut used, &query_subjects)
            .ok_or_else(|| exhausted(format!("no support sample with label {label}")))?;
        support_subjects.insert(items[i].sample.subject_id);
        support.push(i);
    }
    for label in [1u8, 0] {
        let i = pick(Some(label), &mut used, &support_subjects).ok_or_else(|| {
            exhausted(format!(
                "no query sample with label {label} outside the support subjects"
            ))
        })?;
        query_subjects.insert(items[i].sample.subject_id);
        query.push(i);
    }
    while support.len() < n_tr {
        let i = pick(None, &mut used, &query_subjects)
            .ok_or_else(|| exhausted("not enough subjects to fill the support set".into()))?;
        support_subjects.insert(items[i].sample.subject_id);
        support.push(i);
    }
    while query.len() < n_val {
        let i = pick(None, &mut used, &support_subjects)
            .ok_or_else(|| exhausted("not enough subjects to fill the query set".into()))?;
        query_subjects.insert(items[i].sample.subject_id);
        query.push(i);
    }
    // Stratified picks come first; shuffle so position carries no label information.
    support.shuffle(rng);
    query.shuffle(rng);

    let dimension = items[0].sample.features.len();
    let collect =
        |idx: &[usize]| -> Vec<LabeledSample<'_>> { idx.iter().map(|&i| items[i]).collect() };
    let support_items = collect(&support);
    let query_items = collect(&query);
    Ok(Episode {
        task,
        support: to_batch(&support_items, dimension)?,
        query: to_batch(&query_items, dimension)?,
        support_subjects: support_items.iter().map(|i| i.sample.subject_id).collect(),
        query_subjects: query_items.iter().map(|i| i.sample.subject_id).collect(),
    })
}
