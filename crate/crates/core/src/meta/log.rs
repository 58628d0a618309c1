//! Per-iteration meta-training records.
//!
//! Serialized as tab-separated text with a header row. List-valued columns
//! hold one entry per meta-batch slot, comma separated, in slot order.
//! `reward` is the change of each task's observation since its previous visit.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::samplers::SamplerKind;
use crate::tasks::TaskId;

pub const LOG_HEADER: [&str; 9] = [
    "iteration",
    "sampler",
    "tasks",
    "auc_before",
    "auc_after",
    "observation",
    "reward",
    "query_loss",
    "meta_grad_norm",
];

#[derive(Clone, Debug, PartialEq)]
pub struct LogRecord {
    pub iteration: usize,
    pub sampler: SamplerKind,
    pub tasks: Vec<TaskId>,
    pub auc_before: Vec<f64>,
    pub auc_after: Vec<f64>,
    pub observation: Vec<f64>,
    pub reward: Vec<f64>,
    /// Sum of post-adaptation query losses over the meta-batch.
    pub query_loss: f64,
    pub meta_grad_norm: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunLog {
    pub records: Vec<LogRecord>,
}

fn join_floats(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:?}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn split_floats(field: &str, line: usize) -> Result<Vec<f64>> {
    if field.is_empty() {
        return Ok(Vec::new());
    }
    field
        .split(',')
        .map(|v| {
            v.parse::<f64>()
                .map_err(|e| Error::parse(line, format!("`{v}`: {e}")))
        })
        .collect()
}

impl RunLog {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = LOG_HEADER.join("\t");
        out.push('\n');
        for r in &self.records {
            let tasks: Vec<String> = r.tasks.iter().map(TaskId::to_string).collect();
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:?}\t{:?}",
                r.iteration,
                r.sampler,
                tasks.join(","),
                join_floats(&r.auc_before),
                join_floats(&r.auc_after),
                join_floats(&r.observation),
                join_floats(&r.reward),
                r.query_loss,
                r.meta_grad_norm,
            );
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "empty run log"))?;
        if header.split('\t').ne(LOG_HEADER.iter().copied()) {
            return Err(Error::parse(1, "unexpected run log header"));
        }
        let mut records = Vec::new();
        for (n, line) in lines {
            let line_no = n + 1;
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != LOG_HEADER.len() {
                return Err(Error::parse(
                    line_no,
                    format!("expected {} fields, found {}", LOG_HEADER.len(), f.len()),
                ));
            }
            let tasks = if f[2].is_empty() {
                Vec::new()
            } else {
                f[2].split(',')
                    .map(|t| {
                        t.parse::<TaskId>()
                            .map_err(|e| Error::parse(line_no, e.to_string()))
                    })
                    .collect::<Result<Vec<_>>>()?
            };
            let record = LogRecord {
                iteration: f[0]
                    .parse()
                    .map_err(|e| Error::parse(line_no, format!("iteration: {e}")))?,
                sampler: f[1]
                    .parse()
                    .map_err(|e: Error| Error::parse(line_no, e.to_string()))?,
                auc_before: split_floats(f[3], line_no)?,
                auc_after: split_floats(f[4], line_no)?,
                observation: split_floats(f[5], line_no)?,
                reward: split_floats(f[6], line_no)?,
                query_loss: f[7]
                    .parse()
                    .map_err(|e| Error::parse(line_no, format!("query_loss: {e}")))?,
                meta_grad_norm: f[8]
                    .parse()
                    .map_err(|e| Error::parse(line_no, format!("meta_grad_norm: {e}")))?,
                tasks,
            };
            let n = record.tasks.len();
            if [
                &record.auc_before,
                &record.auc_after,
                &record.observation,
                &record.reward,
            ]
            .iter()
            .any(|v| v.len() != n)
            {
                return Err(Error::parse(line_no, "per-task columns disagree in length"));
            }
            records.push(record);
        }
        Ok(RunLog { records })
    }

    /// SHA-256 of the serialized log, hex encoded.
    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(self.to_tsv().as_bytes()))
    }

    /// Mean post-adaptation query AUC over a range of iterations.
    pub fn mean_auc_after(&self, range: std::ops::Range<usize>) -> Option<f64> {
        let values: Vec<f64> = self.records[range]
            .iter()
            .flat_map(|r| r.auc_after.iter().copied())
            .collect();
        (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
    }
}
