//! Meta-learned initialization for a family of related binary classifiers.
//!
//! A small dense network is meta-trained across five binary tasks carved out
//! of a three-class source (no finding / benign / malignant). The meta-batch
//! of each update is chosen by one of four samplers: uniform random, all
//! tasks, a bandit on recent AUC improvement, or a teacher-student curriculum
//! on the change of that improvement. The resulting initialization is then
//! fine-tuned on the screening task and evaluated by ROC-AUC.
//!
//! | module | contents |
//! |---|---|
//! | [`numerics`] | parameter vectors, the classifier, gradients and Hessian-vector products |
//! | [`metrics`] | ROC-AUC, observations and rewards |
//! | [`tasks`] | the task family, synthetic source, episode sampling |
//! | [`samplers`] | meta-batch selection strategies |
//! | [`meta`] | adaptation, meta-gradients, meta-training, fine-tuning, baselines |
//! | [`harness`] | experiment configuration, pipelines, sweeps, tables and curves |

pub mod error;
pub mod harness;
pub mod hexfloat;
pub mod meta;
pub mod metrics;
pub mod numerics;
pub mod rng;
pub mod samplers;
pub mod tasks;

pub use error::{Error, Result};
