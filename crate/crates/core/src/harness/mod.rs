//! Experiment driver: configuration, the three-phase pipeline, sweeps over
//! model variants, result tables, and curriculum curves.

mod config;
mod curves;
mod manifest;
mod pipeline;
mod sweep;
mod table;

pub use config::{ExperimentConfig, ModelSettings, SourceSettings};
pub use curves::{emit_curves, Curves, HistogramRow, TrajectoryPoint, DEFAULT_WINDOW};
pub use manifest::{sha256_hex, Manifest, MANIFEST_FILE};
pub use pipeline::{initial_model, run_pipeline, Method, PipelineResult, RunRecord};
pub use sweep::{run_sweep, ExperimentPlan, SweepOutput, SweepRun, Variant, DEFAULT_REPETITIONS};
pub use table::{CellValue, ResultRow, ResultTable, TABLE_HEADER};
