//! Data model for questions and the per-question pipeline trace.

use crate::error::{Error, Result};
use crate::policy::RoleLabels;
use crate::retrieval::RankedHits;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Gold stage annotations a dataset may carry per question.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GoldAnnotations {
    /// Gold keypoint strings.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub keypoints: Option<Vec<String>>,
    /// Gold grouping as index lists over the keypoints.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grouping: Option<Vec<Vec<usize>>>,
    /// Gold Core/Support/Noise labels over group ids.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roles: Option<RoleLabels>,
}

/// One multiple-choice question.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Question {
    pub id: String,
    pub stem: String,
    /// Option letter -> option text; at least two entries.
    pub options: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "gold")]
    pub gold_option: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotations: Option<GoldAnnotations>,
}

impl Question {
    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty()
            || !self
                .id
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.')
        {
            return Err(Error::input(format!(
                "question id must be non-empty [A-Za-z0-9._-]: {:?}",
                self.id
            )));
        }
        if self.stem.trim().is_empty() {
            return Err(Error::input(format!("question {} has an empty stem", self.id)));
        }
        if self.options.len() < 2 {
            return Err(Error::input(format!(
                "question {} needs at least 2 options",
                self.id
            )));
        }
        if let Some(gold) = &self.gold_option {
            if !self.options.contains_key(gold) {
                return Err(Error::input(format!(
                    "question {}: gold option {:?} is not among options",
                    self.id, gold
                )));
            }
        }
        Ok(())
    }
}

/// An atomic salient information point extracted from the stem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Keypoint {
    pub index: usize,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_span: Option<(usize, usize)>,
}

/// A set of keypoints bound to one knowledge concept, with group-level
/// retrieved evidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeypointGroup {
    pub group_id: usize,
    pub keypoint_indices: BTreeSet<usize>,
    pub label: String,
    pub evidence: RankedHits,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    Core,
    Support,
    Noise,
}

/// A group-level inference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalConclusion {
    pub group_id: usize,
    pub text: String,
    pub cited_chunk_ids: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role_label: Option<Role>,
    /// Set when the stage had to fall back to raw, uncited output.
    #[serde(default)]
    pub degraded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalChain {
    pub selected_conclusion_ids: BTreeSet<usize>,
    pub chain_text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignedAnswer {
    pub chosen_option: String,
    pub per_option_analysis: BTreeMap<String, String>,
    pub rationale: String,
}

/// Full record of one question's pass through the five stages.
///
/// Stage timings are the summed backend-reported latencies per stage, so a
/// fully mocked run serializes identically across executions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineTrace {
    pub question_id: String,
    pub seed: u64,
    pub config_fingerprint: String,
    pub keypoints: Option<Vec<Keypoint>>,
    pub groups: Option<Vec<KeypointGroup>>,
    pub grouping_fallback: bool,
    pub conclusions: Option<Vec<LocalConclusion>>,
    pub selection_fallback: bool,
    pub global_chain: Option<GlobalChain>,
    pub aligned_answer: Option<AlignedAnswer>,
    pub stage_timings: BTreeMap<String, u64>,
    pub warnings: Vec<String>,
    pub failed_at: Option<String>,
    pub error: Option<String>,
}

impl PipelineTrace {
    pub fn new(question_id: &str, seed: u64, fingerprint: &str) -> Self {
        Self {
            question_id: question_id.to_string(),
            seed,
            config_fingerprint: fingerprint.to_string(),
            keypoints: None,
            groups: None,
            grouping_fallback: false,
            conclusions: None,
            selection_fallback: false,
            global_chain: None,
            aligned_answer: None,
            stage_timings: BTreeMap::new(),
            warnings: Vec::new(),
            failed_at: None,
            error: None,
        }
    }

    pub fn failed(&self) -> bool {
        self.failed_at.is_some()
    }

    /// Every id referenced anywhere in the trace must resolve within it.
    pub fn check_consistency(&self) -> Result<()> {
        let kp_count = self.keypoints.as_ref().map_or(0, Vec::len);
        let group_ids: BTreeSet<usize> = self
            .groups
            .as_ref()
            .map(|gs| gs.iter().map(|g| g.group_id).collect())
            .unwrap_or_default();
        if let Some(groups) = &self.groups {
            let mut covered = BTreeSet::new();
            for g in groups {
                for idx in &g.keypoint_indices {
                    if *idx >= kp_count || !covered.insert(*idx) {
                        return Err(Error::input(format!(
                            "trace {}: group {} references keypoint {} invalidly",
                            self.question_id, g.group_id, idx
                        )));
                    }
                }
            }
            if covered.len() != kp_count {
                return Err(Error::input(format!(
                    "trace {}: groups do not cover all keypoints",
                    self.question_id
                )));
            }
        }
        if let Some(conclusions) = &self.conclusions {
            for c in conclusions {
                if !group_ids.contains(&c.group_id) {
                    return Err(Error::input(format!(
                        "trace {}: conclusion references unknown group {}",
                        self.question_id, c.group_id
                    )));
                }
            }
        }
        if let Some(chain) = &self.global_chain {
            let conclusion_ids: BTreeSet<usize> = self
                .conclusions
                .as_ref()
                .map(|cs| cs.iter().map(|c| c.group_id).collect())
                .unwrap_or_default();
            for id in &chain.selected_conclusion_ids {
                if !conclusion_ids.contains(id) {
                    return Err(Error::input(format!(
                        "trace {}: chain selects unknown conclusion {}",
                        self.question_id, id
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let mut out = serde_json::to_string_pretty(self)?;
        out.push('\n');
        Ok(out)
    }

    pub fn from_json(raw: &str) -> Result<Self> {
        Ok(serde_json::from_str(raw)?)
    }
}
