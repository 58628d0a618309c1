//! Meta-training, fine-tuning, inference, and the multi-task baseline.

mod adapt;
mod config;
mod finetune;
mod log;
mod model;
mod multitask;
mod train;

pub use adapt::{
    adapt, adapt_episodes, adaptation_step, adaptation_trajectory, inner_adapt, meta_gradient,
    meta_objective, AdaptationStep,
};
pub use config::{FineTuneConfig, GradientMode, MetaConfig, MultiTaskConfig};
pub use finetune::{batch_auc, evaluate, fine_tune, FineTuneOutput};
pub use log::{LogRecord, RunLog, LOG_HEADER};
pub use model::{infer, ProvenanceEntry, TrainedModel};
pub use multitask::{
    minibatch_indices, multitask_gradient, multitask_train, MultiTaskModel, MultiTaskOutput,
    SplitGradient,
};
pub use train::{meta_train, MetaTrainOutput};
