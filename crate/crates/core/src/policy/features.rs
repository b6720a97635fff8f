//! Engineered per-conclusion features for the selection policy.

use crate::pipeline::{KeypointGroup, LocalConclusion, Question};
use crate::text::{jaccard_tokens, tokenize};

/// Fixed feature dimension: group size, mean evidence score, max evidence
/// score, conclusion length, token overlap with the stem, mean token overlap
/// with the other conclusions, citation count, degraded flag.
pub const FEATURE_DIM: usize = 8;

/// Compute one feature vector per conclusion. Conclusions and groups are
/// matched by group id; a conclusion whose group is missing gets zeroed
/// group features.
pub fn compute_features(
    conclusions: &[LocalConclusion],
    groups: &[KeypointGroup],
    question: &Question,
) -> Vec<Vec<f64>> {
    conclusions
        .iter()
        .map(|c| {
            let group = groups.iter().find(|g| g.group_id == c.group_id);
            let (group_size, mean_score, max_score) = match group {
                Some(g) => {
                    let scores: Vec<f64> = g.evidence.entries.iter().map(|h| h.score).collect();
                    let mean = if scores.is_empty() {
                        0.0
                    } else {
                        scores.iter().sum::<f64>() / scores.len() as f64
                    };
                    let max = scores.iter().copied().fold(0.0f64, f64::max);
                    (g.keypoint_indices.len() as f64, mean, max)
                }
                None => (0.0, 0.0, 0.0),
            };
            let length = tokenize(&c.text).len() as f64 / 50.0;
            let stem_overlap = jaccard_tokens(&c.text, &question.stem);
            let others: Vec<&LocalConclusion> = conclusions
                .iter()
                .filter(|o| o.group_id != c.group_id)
                .collect();
            let other_overlap = if others.is_empty() {
                0.0
            } else {
                others
                    .iter()
                    .map(|o| jaccard_tokens(&c.text, &o.text))
                    .sum::<f64>()
                    / others.len() as f64
            };
            vec![
                group_size,
                mean_score,
                max_score,
                length,
                stem_overlap,
                other_overlap,
                c.cited_chunk_ids.len() as f64,
                if c.degraded { 1.0 } else { 0.0 },
            ]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::retrieval::{Hit, RankedHits};
    use std::collections::BTreeMap;

    #[test]
    fn features_have_fixed_dimension_and_expected_slots() {
        let question = Question {
            id: "q".into(),
            stem: "fever and cough in an adult".into(),
            options: BTreeMap::from([
                ("A".to_string(), "one".to_string()),
                ("B".to_string(), "two".to_string()),
            ]),
            gold_option: None,
            annotations: None,
        };
        let groups = vec![KeypointGroup {
            group_id: 0,
            keypoint_indices: [0, 1].into_iter().collect(),
            label: "g".into(),
            evidence: RankedHits {
                query: "q".into(),
                k: 8,
                entries: vec![
                    Hit {
                        chunk_id: "d:0".into(),
                        score: 2.0,
                    },
                    Hit {
                        chunk_id: "d:1".into(),
                        score: 1.0,
                    },
                ],
            },
        }];
        let conclusions = vec![
            LocalConclusion {
                group_id: 0,
                text: "fever suggests infection".into(),
                cited_chunk_ids: vec!["d:0".into()],
                role_label: None,
                degraded: false,
            },
            LocalConclusion {
                group_id: 1,
                text: "unrelated".into(),
                cited_chunk_ids: vec![],
                role_label: None,
                degraded: true,
            },
        ];
        let features = compute_features(&conclusions, &groups, &question);
        assert_eq!(features.len(), 2);
        assert!(features.iter().all(|f| f.len() == FEATURE_DIM));
        assert_eq!(features[0][0], 2.0); // group size
        assert_eq!(features[0][1], 1.5); // mean evidence score
        assert_eq!(features[0][2], 2.0); // max evidence score
        assert_eq!(features[0][6], 1.0); // citation count
        assert_eq!(features[0][7], 0.0);
        assert_eq!(features[1][0], 0.0); // missing group
        assert_eq!(features[1][7], 1.0); // degraded
        assert!(features[0][4] > 0.0); // stem overlap present
    }
}
