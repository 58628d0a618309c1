//! The five binary tasks over a synthetic three-class source, and episode sampling.

mod definition;
mod episode;
pub mod io;
mod source;

pub use definition::{
    ClassSet, TaskDefinition, TaskId, CLASS_BENIGN, CLASS_MALIGNANT, CLASS_NONE, NUM_CLASSES,
};
pub use episode::{eligible, map_labels, sample_episode, Episode, LabeledSample};
pub use source::{
    generate_source, split_sizes, SourceConfig, SourceSample, SplitDataset, SPLIT_PROPORTIONS,
};
