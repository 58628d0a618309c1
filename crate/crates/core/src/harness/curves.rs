//! Plot-ready data derived from a run log.

use std::fmt::Write as _;

use crate::meta::RunLog;
use crate::tasks::TaskId;

pub const DEFAULT_WINDOW: usize = 100;

/// One adaptation of one task.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryPoint {
    pub iteration: usize,
    pub task: TaskId,
    /// How many times the task had been adapted to before, counting earlier
    /// slots of the same meta-batch.
    pub visit: usize,
    pub auc_before: f64,
    pub auc_after: f64,
    pub observation: f64,
    pub reward: f64,
}

/// Selections per task inside a window of meta-updates.
#[derive(Clone, Debug, PartialEq)]
pub struct HistogramRow {
    pub window_start: usize,
    /// Number of meta-updates covered; smaller than the window for the last row.
    pub iterations: usize,
    pub counts: [usize; 5],
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Curves {
    pub trajectories: Vec<TrajectoryPoint>,
    pub histogram: Vec<HistogramRow>,
}

pub fn emit_curves(log: &RunLog, window: usize) -> Curves {
    let window = window.max(1);
    let mut visits = [0usize; 5];
    let mut curves = Curves::default();
    for record in &log.records {
        for (slot, &task) in record.tasks.iter().enumerate() {
            curves.trajectories.push(TrajectoryPoint {
                iteration: record.iteration,
                task,
                visit: visits[task.index()],
                auc_before: record.auc_before[slot],
                auc_after: record.auc_after[slot],
                observation: record.observation[slot],
                reward: record.reward[slot],
            });
            visits[task.index()] += 1;
        }
    }
    for chunk in log.records.chunks(window) {
        let mut counts = [0usize; 5];
        for record in chunk {
            for task in &record.tasks {
                counts[task.index()] += 1;
            }
        }
        curves.histogram.push(HistogramRow {
            window_start: chunk[0].iteration,
            iterations: chunk.len(),
            counts,
        });
    }
    curves
}

impl Curves {
    pub fn trajectories_tsv(&self) -> String {
        let mut out =
            String::from("iteration\ttask\tvisit\tauc_before\tauc_after\tobservation\treward\n");
        for p in &self.trajectories {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{:?}\t{:?}\t{:?}\t{:?}",
                p.iteration, p.task, p.visit, p.auc_before, p.auc_after, p.observation, p.reward
            );
        }
        out
    }

    pub fn histogram_tsv(&self) -> String {
        let mut out = String::from("window_start\titerations");
        for t in TaskId::ALL {
            let _ = write!(out, "\t{t}");
        }
        out.push('\n');
        for row in &self.histogram {
            let _ = write!(out, "{}\t{}", row.window_start, row.iterations);
            for c in row.counts {
                let _ = write!(out, "\t{c}");
            }
            out.push('\n');
        }
        out
    }
}
