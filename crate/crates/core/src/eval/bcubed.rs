//! BCubed clustering scores for the grouping stage.

use super::PrfScores;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A clustering as item -> cluster assignments, total over the item
/// universe.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub assignments: BTreeMap<usize, usize>,
}

impl Partition {
    /// Build from cluster membership lists; items may appear once only.
    pub fn from_clusters(clusters: &[Vec<usize>]) -> Result<Self> {
        let mut assignments = BTreeMap::new();
        for (cluster_id, members) in clusters.iter().enumerate() {
            for item in members {
                if assignments.insert(*item, cluster_id).is_some() {
                    return Err(Error::input(format!(
                        "item {item} appears in more than one cluster"
                    )));
                }
            }
        }
        Ok(Self { assignments })
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    fn cluster_of(&self, item: usize) -> usize {
        self.assignments[&item]
    }
}

/// BCubed precision/recall/F1 of a predicted partition against a gold one.
///
/// Per item, precision is the fraction of items sharing its predicted
/// cluster (itself included) that also share its gold cluster; recall swaps
/// the roles. The averaged precision and recall are combined by harmonic
/// mean.
pub fn bcubed(predicted: &Partition, gold: &Partition) -> Result<PrfScores> {
    let items: Vec<usize> = predicted.assignments.keys().copied().collect();
    let gold_items: Vec<usize> = gold.assignments.keys().copied().collect();
    if items != gold_items {
        return Err(Error::input(
            "predicted and gold partitions cover different item universes",
        ));
    }
    if items.is_empty() {
        return Ok(PrfScores::perfect());
    }
    let (mut precision_sum, mut recall_sum) = (0.0f64, 0.0f64);
    for &item in &items {
        let same_pred: Vec<usize> = items
            .iter()
            .copied()
            .filter(|&o| predicted.cluster_of(o) == predicted.cluster_of(item))
            .collect();
        let same_gold: Vec<usize> = items
            .iter()
            .copied()
            .filter(|&o| gold.cluster_of(o) == gold.cluster_of(item))
            .collect();
        let both = same_pred
            .iter()
            .filter(|&&o| gold.cluster_of(o) == gold.cluster_of(item))
            .count() as f64;
        precision_sum += both / same_pred.len() as f64;
        recall_sum += both / same_gold.len() as f64;
    }
    let n = items.len() as f64;
    Ok(PrfScores::from_pr(precision_sum / n, recall_sum / n))
}

/// Metric variant: mean over items of the per-item harmonic mean, instead of
/// the harmonic mean of the averaged precision and recall.
pub fn bcubed_per_item_f1_mean(predicted: &Partition, gold: &Partition) -> Result<f64> {
    let items: Vec<usize> = predicted.assignments.keys().copied().collect();
    if items != gold.assignments.keys().copied().collect::<Vec<_>>() {
        return Err(Error::input(
            "predicted and gold partitions cover different item universes",
        ));
    }
    if items.is_empty() {
        return Ok(1.0);
    }
    let mut total = 0.0f64;
    for &item in &items {
        let same_pred: Vec<usize> = items
            .iter()
            .copied()
            .filter(|&o| predicted.cluster_of(o) == predicted.cluster_of(item))
            .collect();
        let same_gold_count = items
            .iter()
            .filter(|&&o| gold.cluster_of(o) == gold.cluster_of(item))
            .count() as f64;
        let both = same_pred
            .iter()
            .filter(|&&o| gold.cluster_of(o) == gold.cluster_of(item))
            .count() as f64;
        let p = both / same_pred.len() as f64;
        let r = both / same_gold_count;
        total += if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
    }
    Ok(total / items.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn partition(clusters: &[&[usize]]) -> Partition {
        Partition::from_clusters(&clusters.iter().map(|c| c.to_vec()).collect::<Vec<_>>())
            .unwrap()
    }

    #[test]
    fn identical_partitions_are_perfect() {
        let p = partition(&[&[0, 1], &[2]]);
        assert_eq!(bcubed(&p, &p).unwrap(), PrfScores::perfect());
    }

    #[test]
    fn all_singletons_against_pair() {
        // gold {a,b},{c}; predicted singletons: P=1, R=2/3, F1=0.8.
        let gold = partition(&[&[0, 1], &[2]]);
        let pred = partition(&[&[0], &[1], &[2]]);
        let scores = bcubed(&pred, &gold).unwrap();
        assert!((scores.precision - 1.0).abs() < 1e-12);
        assert!((scores.recall - 2.0 / 3.0).abs() < 1e-12);
        assert!((scores.f1 - 0.8).abs() < 1e-9);
    }

    #[test]
    fn single_cluster_against_pair() {
        // gold {a,b},{c}; predicted {a,b,c}: P=5/9, R=1, F1=5/7.
        let gold = partition(&[&[0, 1], &[2]]);
        let pred = partition(&[&[0, 1, 2]]);
        let scores = bcubed(&pred, &gold).unwrap();
        assert!((scores.precision - 5.0 / 9.0).abs() < 1e-12);
        assert!((scores.recall - 1.0).abs() < 1e-12);
        assert!((scores.f1 - 5.0 / 7.0).abs() < 1e-9);
    }

    #[test]
    fn precision_and_recall_swap_with_arguments() {
        let a = partition(&[&[0, 1], &[2], &[3, 4]]);
        let b = partition(&[&[0], &[1, 2], &[3, 4]]);
        let ab = bcubed(&a, &b).unwrap();
        let ba = bcubed(&b, &a).unwrap();
        assert!((ab.precision - ba.recall).abs() < 1e-12);
        assert!((ab.recall - ba.precision).abs() < 1e-12);
    }

    #[test]
    fn universe_mismatch_is_input_error() {
        let a = partition(&[&[0, 1]]);
        let b = partition(&[&[0, 1, 2]]);
        assert!(bcubed(&a, &b).is_err());
    }

    #[test]
    fn duplicate_item_rejected() {
        assert!(Partition::from_clusters(&[vec![0, 1], vec![1]]).is_err());
    }
}
