//! Stage-wise evaluation metrics.

mod bcubed;
mod judge;
mod report;

pub use bcubed::{bcubed, bcubed_per_item_f1_mean, Partition};
pub use judge::{derive_role_labels, judge_local, JudgeVerdict};
pub use report::{answer_accuracy, render_table, stage_report, MetricAverage, StageMetrics};

use crate::text::token_f1;
use serde::{Deserialize, Serialize};

/// Default token-F1 threshold above which a predicted keypoint matches a
/// gold keypoint.
pub const KEYPOINT_MATCH_THRESHOLD: f64 = 0.6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrfScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl PrfScores {
    pub fn from_pr(precision: f64, recall: f64) -> Self {
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Self {
            precision,
            recall,
            f1,
        }
    }

    pub const fn perfect() -> Self {
        Self {
            precision: 1.0,
            recall: 1.0,
            f1: 1.0,
        }
    }

    pub const fn zero() -> Self {
        Self {
            precision: 0.0,
            recall: 0.0,
            f1: 0.0,
        }
    }
}

/// Greedy one-to-one keypoint matching: candidate pairs ordered by
/// descending token F1 (ties by predicted then gold index), a pair matches
/// when its token F1 meets `threshold`. Both lists empty scores 1; exactly
/// one empty scores 0.
pub fn extraction_prf(predicted: &[String], gold: &[String], threshold: f64) -> PrfScores {
    if predicted.is_empty() && gold.is_empty() {
        return PrfScores::perfect();
    }
    if predicted.is_empty() || gold.is_empty() {
        return PrfScores::zero();
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (pi, p) in predicted.iter().enumerate() {
        for (gi, g) in gold.iter().enumerate() {
            let f1 = token_f1(p, g);
            if f1 >= threshold {
                pairs.push((f1, pi, gi));
            }
        }
    }
    pairs.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });
    let mut used_pred = vec![false; predicted.len()];
    let mut used_gold = vec![false; gold.len()];
    let mut matches = 0usize;
    for (_, pi, gi) in pairs {
        if !used_pred[pi] && !used_gold[gi] {
            used_pred[pi] = true;
            used_gold[gi] = true;
            matches += 1;
        }
    }
    PrfScores::from_pr(
        matches as f64 / predicted.len() as f64,
        matches as f64 / gold.len() as f64,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strs(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn identical_lists_are_perfect() {
        let items = strs(&["fever", "productive cough", "age 67", "night sweats"]);
        let scores = extraction_prf(&items, &items, KEYPOINT_MATCH_THRESHOLD);
        assert_eq!(scores, PrfScores::perfect());
    }

    #[test]
    fn three_of_four_plus_spurious() {
        let gold = strs(&["fever", "productive cough", "night sweats", "weight loss"]);
        let pred = strs(&["fever", "productive cough", "weight loss", "loves hiking"]);
        let scores = extraction_prf(&pred, &gold, KEYPOINT_MATCH_THRESHOLD);
        assert!((scores.precision - 0.75).abs() < 1e-12);
        assert!((scores.recall - 0.75).abs() < 1e-12);
        assert!((scores.f1 - 0.75).abs() < 1e-12);
    }

    #[test]
    fn empty_conventions() {
        assert_eq!(extraction_prf(&[], &[], 0.6), PrfScores::perfect());
        assert_eq!(extraction_prf(&[], &strs(&["fever"]), 0.6), PrfScores::zero());
        assert_eq!(extraction_prf(&strs(&["fever"]), &[], 0.6), PrfScores::zero());
    }

    #[test]
    fn near_match_counts_when_above_threshold() {
        // "cough" vs "productive cough" has token F1 2/3 >= 0.6.
        let scores = extraction_prf(
            &strs(&["cough"]),
            &strs(&["productive cough"]),
            KEYPOINT_MATCH_THRESHOLD,
        );
        assert_eq!(scores.precision, 1.0);
        assert_eq!(scores.recall, 1.0);
    }

    #[test]
    fn one_to_one_matching_prevents_double_counting() {
        let gold = strs(&["fever"]);
        let pred = strs(&["fever", "fever"]);
        let scores = extraction_prf(&pred, &gold, KEYPOINT_MATCH_THRESHOLD);
        assert!((scores.precision - 0.5).abs() < 1e-12);
        assert_eq!(scores.recall, 1.0);
    }
}
