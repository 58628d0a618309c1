//! Aggregated results: one row per (model, meta-batch size, sampler).
//!
//! Machine-readable form is tab separated with the header
//! `model meta_batch sampler status mean std n`; `-` marks an absent
//! meta-batch size or sampler, `status` is `ok`, `na`, or `failed`, and a
//! failed row carries its message in the `mean` column.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::samplers::SamplerKind;

pub const TABLE_HEADER: [&str; 7] = [
    "model",
    "meta_batch",
    "sampler",
    "status",
    "mean",
    "std",
    "n",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum CellValue {
    Ok {
        mean: f64,
        std: f64,
        n: usize,
    },
    /// The variant is structurally invalid (all-task sampling with a
    /// meta-batch that differs from the pool size).
    Na,
    Failed {
        message: String,
    },
}

impl CellValue {
    /// Mean and sample standard deviation (zero for a single value).
    pub fn from_values(values: &[f64]) -> CellValue {
        let n = values.len();
        if n == 0 {
            return CellValue::Failed {
                message: "no completed repetitions".into(),
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        CellValue::Ok { mean, std, n }
    }

    pub fn mean(&self) -> Option<f64> {
        match self {
            CellValue::Ok { mean, .. } => Some(*mean),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub model: String,
    pub meta_batch: Option<usize>,
    pub sampler: Option<SamplerKind>,
    pub value: CellValue,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

fn clean(text: &str) -> String {
    text.replace(['\t', '\n', '\r'], " ")
}

impl ResultTable {
    pub fn get(
        &self,
        model: &str,
        meta_batch: Option<usize>,
        sampler: Option<SamplerKind>,
    ) -> Option<&CellValue> {
        self.rows
            .iter()
            .find(|r| r.model == model && r.meta_batch == meta_batch && r.sampler == sampler)
            .map(|r| &r.value)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = TABLE_HEADER.join("\t");
        out.push('\n');
        for row in &self.rows {
            let k = row.meta_batch.map_or("-".to_string(), |k| k.to_string());
            let s = row.sampler.map_or("-", SamplerKind::as_str);
            let _ = write!(out, "{}\t{k}\t{s}\t", clean(&row.model));
            let _ = match &row.value {
                CellValue::Ok { mean, std, n } => writeln!(out, "ok\t{mean:?}\t{std:?}\t{n}"),
                CellValue::Na => writeln!(out, "na\t-\t-\t-"),
                CellValue::Failed { message } => {
                    writeln!(out, "failed\t{}\t-\t-", clean(message))
                }
            };
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty table"))?;
        if header.split('\t').ne(TABLE_HEADER.iter().copied()) {
            return Err(Error::parse(1, "unexpected table header"));
        }
        let mut rows = Vec::new();
        for (n, line) in lines {
            let line_no = n + 1;
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != TABLE_HEADER.len() {
                return Err(Error::parse(line_no, "wrong number of fields"));
            }
            let err = |what: &str| Error::parse(line_no, format!("invalid {what}"));
            let meta_batch = match f[1] {
                "-" => None,
                k => Some(k.parse().map_err(|_| err("meta_batch"))?),
            };
            let sampler = match f[2] {
                "-" => None,
                s => Some(s.parse().map_err(|_| err("sampler"))?),
            };
            let value = match f[3] {
                "ok" => CellValue::Ok {
                    mean: f[4].parse().map_err(|_| err("mean"))?,
                    std: f[5].parse().map_err(|_| err("std"))?,
                    n: f[6].parse().map_err(|_| err("n"))?,
                },
                "na" => CellValue::Na,
                "failed" => CellValue::Failed {
                    message: f[4].to_string(),
                },
                _ => return Err(err("status")),
            };
            rows.push(ResultRow {
                model: f[0].to_string(),
                meta_batch,
                sampler,
                value,
            });
        }
        Ok(ResultTable { rows })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))
    }

    /// Plain-text rendering: baseline rows first, then one line per
    /// (model, |K|) with a column per sampler.
    pub fn render(&self) -> String {
        let fmt_cell = |v: &CellValue| match v {
            CellValue::Ok { mean, std, .. } => format!("{mean:.3} ± {std:.3}"),
            CellValue::Na => "N/A".to_string(),
            CellValue::Failed { .. } => "failed".to_string(),
        };
        let mut out = String::new();
        let baselines: Vec<&ResultRow> = self.rows.iter().filter(|r| r.sampler.is_none()).collect();
        if !baselines.is_empty() {
            let _ = writeln!(out, "{:<12} {:>15}", "Baseline", "AUC");
            for r in baselines {
                let _ = writeln!(out, "{:<12} {:>15}", r.model, fmt_cell(&r.value));
            }
            out.push('\n');
        }
        let mut groups: Vec<(String, Option<usize>)> = Vec::new();
        for r in self.rows.iter().filter(|r| r.sampler.is_some()) {
            let key = (r.model.clone(), r.meta_batch);
            if !groups.contains(&key) {
                groups.push(key);
            }
        }
        if !groups.is_empty() {
            let _ = write!(out, "{:<12} {:>3}", "Model", "|K|");
            for s in SamplerKind::ALL {
                let _ = write!(out, " {:>15}", s.display_name());
            }
            out.push('\n');
            for (model, k) in groups {
                let k_text = k.map_or("-".into(), |k| k.to_string());
                let _ = write!(out, "{model:<12} {k_text:>3}");
                for s in SamplerKind::ALL {
                    let cell = self.get(&model, k, Some(s)).map_or(String::new(), fmt_cell);
                    let _ = write!(out, " {cell:>15}");
                }
                out.push('\n');
            }
        }
        out
    }
}
