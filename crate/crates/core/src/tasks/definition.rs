use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Source classes: no finding, benign finding, malignant finding.
pub const NUM_CLASSES: usize = 3;
pub const CLASS_NONE: u8 = 0;
pub const CLASS_BENIGN: u8 = 1;
pub const CLASS_MALIGNANT: u8 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TaskId {
    K1,
    K2,
    K3,
    K4,
    K5,
}

impl TaskId {
    pub const ALL: [TaskId; 5] = [TaskId::K1, TaskId::K2, TaskId::K3, TaskId::K4, TaskId::K5];

    /// The screening task: malignant against everything else.
    pub const TARGET: TaskId = TaskId::K5;

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<TaskId> {
        TaskId::ALL.get(index).copied()
    }

    pub fn definition(self) -> TaskDefinition {
        TaskDefinition::from(self)
    }
}

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K{}", self.index() + 1)
    }
}

impl FromStr for TaskId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.strip_prefix('K')
            .or_else(|| s.strip_prefix('k'))
            .and_then(|n| n.parse::<usize>().ok())
            .and_then(|n| n.checked_sub(1))
            .and_then(TaskId::from_index)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown task `{s}`")))
    }
}

/// Set of source classes, one bit per class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ClassSet(u8);

impl ClassSet {
    pub const fn of(classes: &[u8]) -> ClassSet {
        let mut bits = 0u8;
        let mut i = 0;
        while i < classes.len() {
            bits |= 1 << classes[i];
            i += 1;
        }
        ClassSet(bits)
    }

    pub fn contains(self, class: u8) -> bool {
        class < 8 && self.0 & (1 << class) != 0
    }

    pub fn iter(self) -> impl Iterator<Item = u8> {
        (0..NUM_CLASSES as u8).filter(move |&c| self.contains(c))
    }

    pub fn is_subset_of(self, other: ClassSet) -> bool {
        self.0 & !other.0 == 0
    }
}

/// A binary problem carved out of the three source classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TaskDefinition {
    pub id: TaskId,
    pub included: ClassSet,
    pub positive: ClassSet,
}

impl TaskDefinition {
    /// `None` when the class does not take part in this task.
    pub fn label(&self, class: u8) -> Option<u8> {
        self.included
            .contains(class)
            .then(|| u8::from(self.positive.contains(class)))
    }
}

impl From<TaskId> for TaskDefinition {
    fn from(id: TaskId) -> Self {
        let (included, positive): (&[u8], &[u8]) = match id {
            TaskId::K1 => (&[0, 1, 2], &[1, 2]),
            TaskId::K2 => (&[0, 2], &[2]),
            TaskId::K3 => (&[0, 1], &[1]),
            TaskId::K4 => (&[1, 2], &[2]),
            TaskId::K5 => (&[0, 1, 2], &[2]),
        };
        TaskDefinition {
            id,
            included: ClassSet::of(included),
            positive: ClassSet::of(positive),
        }
    }
}
