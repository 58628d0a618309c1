//! ROC-AUC and the per-task improvement signals used by the task samplers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Classifier scores for the positive class with their binary labels.
#[derive(Clone, Copy, Debug)]
pub struct ScoredLabels<'a> {
    scores: &'a [f64],
    labels: &'a [u8],
}

impl<'a> ScoredLabels<'a> {
    pub fn new(scores: &'a [f64], labels: &'a [u8]) -> Result<Self> {
        if scores.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                context: "scored labels",
                expected: scores.len(),
                found: labels.len(),
            });
        }
        if let Some((index, &label)) = labels.iter().enumerate().find(|(_, &l)| l > 1) {
            return Err(Error::InvalidLabel { index, label });
        }
        Ok(ScoredLabels { scores, labels })
    }

    pub fn scores(&self) -> &'a [f64] {
        self.scores
    }

    pub fn labels(&self) -> &'a [u8] {
        self.labels
    }

    fn class_counts(&self) -> Result<(usize, usize)> {
        let positives = self.labels.iter().filter(|&&l| l == 1).count();
        let negatives = self.labels.len() - positives;
        if positives == 0 || negatives == 0 {
            return Err(Error::DegenerateAuc {
                positives,
                negatives,
            });
        }
        Ok((positives, negatives))
    }
}

/// Area under the ROC curve.
///
/// Sorts once and walks tied-score groups, crediting half a pair for every
/// positive/negative tie. This is the trapezoidal area of the ROC curve.
pub fn compute_auc(data: &ScoredLabels<'_>) -> Result<f64> {
    let (positives, negatives) = data.class_counts()?;
    let mut order: Vec<usize> = (0..data.scores.len()).collect();
    order.sort_by(|&a, &b| data.scores[a].total_cmp(&data.scores[b]));

    // Count, for each positive, the negatives strictly below it plus half the tied ones.
    let mut negatives_below = 0usize;
    let mut concordant_twice = 0u128;
    let mut i = 0;
    while i < order.len() {
        let score = data.scores[order[i]];
        let mut j = i;
        let (mut pos_group, mut neg_group) = (0usize, 0usize);
        while j < order.len() && data.scores[order[j]] == score {
            if data.labels[order[j]] == 1 {
                pos_group += 1;
            } else {
                neg_group += 1;
            }
            j += 1;
        }
        concordant_twice += (pos_group as u128) * (2 * negatives_below as u128 + neg_group as u128);
        negatives_below += neg_group;
        i = j;
    }
    Ok(concordant_twice as f64 / (2.0 * positives as f64 * negatives as f64))
}

/// AUC by explicit enumeration of every positive/negative pair.
pub fn pairwise_auc(data: &ScoredLabels<'_>) -> Result<f64> {
    let (positives, negatives) = data.class_counts()?;
    let mut wins = 0.0;
    for (i, &li) in data.labels.iter().enumerate() {
        if li != 1 {
            continue;
        }
        for (j, &lj) in data.labels.iter().enumerate() {
            if lj != 0 {
                continue;
            }
            let (sp, sn) = (data.scores[i], data.scores[j]);
            if sp > sn {
                wins += 1.0;
            } else if sp == sn {
                wins += 0.5;
            }
        }
    }
    Ok(wins / (positives as f64 * negatives as f64))
}

/// A point of the empirical ROC curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RocPoint {
    pub threshold: f64,
    pub false_positive_rate: f64,
    pub true_positive_rate: f64,
}

/// ROC curve from the highest threshold down, starting at (0, 0).
/// Tied scores produce one point.
pub fn roc_curve(data: &ScoredLabels<'_>) -> Result<Vec<RocPoint>> {
    let (positives, negatives) = data.class_counts()?;
    let mut order: Vec<usize> = (0..data.scores.len()).collect();
    order.sort_by(|&a, &b| data.scores[b].total_cmp(&data.scores[a]));
    let mut points = vec![RocPoint {
        threshold: f64::INFINITY,
        false_positive_rate: 0.0,
        true_positive_rate: 0.0,
    }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let score = data.scores[order[i]];
        while i < order.len() && data.scores[order[i]] == score {
            if data.labels[order[i]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(RocPoint {
            threshold: score,
            false_positive_rate: fp as f64 / negatives as f64,
            true_positive_rate: tp as f64 / positives as f64,
        });
    }
    Ok(points)
}

/// Trapezoidal integration of [`roc_curve`].
pub fn trapezoidal_auc(data: &ScoredLabels<'_>) -> Result<f64> {
    let points = roc_curve(data)?;
    Ok(points
        .windows(2)
        .map(|w| {
            (w[1].false_positive_rate - w[0].false_positive_rate)
                * (w[0].true_positive_rate + w[1].true_positive_rate)
                / 2.0
        })
        .sum())
}

/// AUC improvement produced by adapting to a task.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation(f64);

impl Observation {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Change of a task's observation since it was last sampled.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reward(f64);

impl Reward {
    pub fn value(self) -> f64 {
        self.0
    }
}

fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::OutOfRange {
            name,
            value,
            min: 0.0,
            max: 1.0,
        });
    }
    Ok(())
}

pub fn observation(auc_after: f64, auc_before: f64) -> Result<Observation> {
    check_unit("auc_after", auc_after)?;
    check_unit("auc_before", auc_before)?;
    Ok(Observation(auc_after - auc_before))
}

pub fn reward(current: Observation, previous: Observation) -> Reward {
    Reward(current.0 - previous.0)
}
