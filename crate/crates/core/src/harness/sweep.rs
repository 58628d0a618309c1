//! Repeated runs over a grid of model variants.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::table::{CellValue, ResultRow, ResultTable};
use super::{run_pipeline, ExperimentConfig, Method, RunRecord};
use crate::error::{Error, Result};
use crate::rng::{stream, stream_seed};
use crate::samplers::SamplerKind;

/// One row (or cell) of the results table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Variant {
    pub model: String,
    pub method: Method,
    pub meta_batch: Option<usize>,
    pub sampler: Option<SamplerKind>,
    pub exclude_target_task: bool,
}

impl Variant {
    pub fn meta(
        model: &str,
        meta_batch: usize,
        sampler: SamplerKind,
        exclude_target_task: bool,
    ) -> Self {
        Variant {
            model: model.into(),
            method: Method::Meta,
            meta_batch: Some(meta_batch),
            sampler: Some(sampler),
            exclude_target_task,
        }
    }

    pub fn baseline(model: &str, method: Method) -> Self {
        Variant {
            model: model.into(),
            method,
            meta_batch: None,
            sampler: None,
            exclude_target_task: false,
        }
    }

    /// All-task sampling needs the meta-batch to cover the pool exactly.
    pub fn is_applicable(&self) -> bool {
        match (self.sampler, self.meta_batch) {
            (Some(SamplerKind::AllTask), Some(k)) => {
                let pool = if self.exclude_target_task { 4 } else { 5 };
                k == pool
            }
            _ => true,
        }
    }

    /// Configuration for repetition `r`.
    pub fn config(&self, base: &ExperimentConfig, repetition: u64) -> ExperimentConfig {
        let mut config = base.clone();
        config.data_seed = stream_seed(base.data_seed, stream::REPETITION_BASE + repetition);
        config.meta.seed = stream_seed(base.meta.seed, stream::REPETITION_BASE + repetition);
        if let Some(k) = self.meta_batch {
            config.meta.meta_batch_size = k;
        }
        if let Some(s) = self.sampler {
            config.meta.sampler = s;
        }
        config.meta.exclude_target_task = self.exclude_target_task;
        config
    }

    /// Directory name used for this variant's runs.
    pub fn slug(&self) -> String {
        let mut slug = self.model.to_lowercase();
        if let Some(k) = self.meta_batch {
            slug.push_str(&format!("-k{k}"));
        }
        if let Some(s) = self.sampler {
            slug.push('-');
            slug.push_str(s.as_str());
        }
        slug
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub base: ExperimentConfig,
    pub variants: Vec<Variant>,
    pub repetitions: u64,
}

pub const DEFAULT_REPETITIONS: u64 = 10;

impl ExperimentPlan {
    /// The standard grid: meta-training with |K| in {3, 5} and every
    /// sampler, the screening-task-excluded variant with |K| = 4, and the
    /// plain and multi-task baselines.
    pub fn standard(base: ExperimentConfig) -> Self {
        let mut variants = vec![
            Variant::baseline("Plain", Method::Plain),
            Variant::baseline("Multi-task", Method::MultiTask),
        ];
        for k in [3, 5] {
            for s in SamplerKind::ALL {
                variants.push(Variant::meta("BSML", k, s, false));
            }
        }
        for s in SamplerKind::ALL {
            variants.push(Variant::meta("BSML-NS", 4, s, true));
        }
        ExperimentPlan {
            base,
            variants,
            repetitions: DEFAULT_REPETITIONS,
        }
    }
}

/// Outcome of one (variant, repetition) pair.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRun {
    pub variant: usize,
    pub repetition: u64,
    pub outcome: std::result::Result<RunRecord, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOutput {
    pub table: ResultTable,
    pub runs: Vec<SweepRun>,
}

impl SweepOutput {
    /// Test AUCs of a variant in repetition order, skipping failed runs.
    pub fn test_aucs(&self, variant: usize) -> Vec<f64> {
        self.runs
            .iter()
            .filter(|r| r.variant == variant)
            .filter_map(|r| r.outcome.as_ref().ok().map(|rec| rec.test_auc))
            .collect()
    }
}

/// Runs every applicable (variant, repetition) pair in parallel and
/// aggregates test AUCs in plan order. Failed runs are kept in `runs`; a
/// cell with any failure is reported as failed. When `out` is given, each
/// run writes its artifacts to `out/<variant>/rep-<r>`.
pub fn run_sweep(plan: &ExperimentPlan, out: Option<&Path>) -> Result<SweepOutput> {
    plan.base.validate()?;
    if plan.repetitions == 0 {
        return Err(Error::InvalidConfig("repetitions must be positive".into()));
    }
    let jobs: Vec<(usize, u64)> = plan
        .variants
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_applicable())
        .flat_map(|(i, _)| (0..plan.repetitions).map(move |r| (i, r)))
        .collect();
    let runs: Vec<SweepRun> = jobs
        .par_iter()
        .map(|&(i, r)| {
            let variant = &plan.variants[i];
            let config = variant.config(&plan.base, r);
            let outcome = run_pipeline(&config, variant.method).and_then(|result| {
                if let Some(dir) = out {
                    let dir = dir.join(variant.slug()).join(format!("rep-{r}"));
                    result.write_artifacts(&dir, &config, variant.method, "sweep")?;
                }
                Ok(result.record(&config, variant.method))
            });
            SweepRun {
                variant: i,
                repetition: r,
                outcome: outcome.map_err(|e| e.to_string()),
            }
        })
        .collect();

    let rows = plan
        .variants
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let value = if !v.is_applicable() {
                CellValue::Na
            } else if let Some(failure) = runs
                .iter()
                .filter(|run| run.variant == i)
                .find_map(|run| run.outcome.as_ref().err())
            {
                CellValue::Failed {
                    message: failure.clone(),
                }
            } else {
                let aucs: Vec<f64> = runs
                    .iter()
                    .filter(|run| run.variant == i)
                    .filter_map(|run| run.outcome.as_ref().ok().map(|rec| rec.test_auc))
                    .collect();
                CellValue::from_values(&aucs)
            };
            ResultRow {
                model: v.model.clone(),
                meta_batch: v.meta_batch,
                sampler: v.sampler,
                value,
            }
        })
        .collect();
    Ok(SweepOutput {
        table: ResultTable { rows },
        runs,
    })
}
