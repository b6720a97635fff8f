//! Conclusion-selection policy: WIF reward, Bernoulli policy head, rollout
//! sampling, group-relative advantages, and the policy-gradient trainer.
//!
//! The trainable policy is a logistic head over engineered per-conclusion
//! features. Selection during inference thresholds probabilities at 0.5;
//! Bernoulli sampling happens only during training.

mod features;
mod model;
mod rollout;
mod synthetic;
mod train;
mod wif;

pub use features::{compute_features, FEATURE_DIM};
pub use model::{log_prob, selection_probs, PolicyFile, PolicyParams, PROB_CLAMP};
pub use rollout::{advantages, sample_rollouts, ADVANTAGE_EPSILON};
pub use synthetic::separable_benchmark;
pub use train::{mean_sampled_reward, policy_gradient_step, train_policy, TrainConfig};
pub use wif::{wif_score, RoleLabels, WifParams};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// One training example: per-conclusion feature vectors plus role labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionInstance {
    #[serde(rename = "qid")]
    pub question_id: String,
    pub features: Vec<Vec<f64>>,
    pub labels: RoleLabels,
}

impl SelectionInstance {
    pub fn new(question_id: &str, features: Vec<Vec<f64>>, labels: RoleLabels) -> Result<Self> {
        let inst = Self {
            question_id: question_id.to_string(),
            features,
            labels,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.features.len();
        if n == 0 {
            return Err(Error::input(format!(
                "instance {} has no conclusions",
                self.question_id
            )));
        }
        let dim = self.features[0].len();
        for (i, f) in self.features.iter().enumerate() {
            if f.len() != dim {
                return Err(Error::input(format!(
                    "instance {}: feature {} has dimension {} (expected {})",
                    self.question_id,
                    i,
                    f.len(),
                    dim
                )));
            }
            if f.iter().any(|v| !v.is_finite()) {
                return Err(Error::input(format!(
                    "instance {}: feature {} contains non-finite values",
                    self.question_id, i
                )));
            }
        }
        self.labels.validate(n)?;
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.features[0].len()
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }
}

/// Load selection instances from JSONL, one instance per line.
pub fn load_instances(path: &std::path::Path) -> Result<Vec<SelectionInstance>> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| Error::input(format!("cannot read instances {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (lineno, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let inst: SelectionInstance = serde_json::from_str(line).map_err(|e| {
            Error::input(format!(
                "bad instance at {}:{}: {e}",
                path.display(),
                lineno + 1
            ))
        })?;
        inst.validate()
            .map_err(|e| Error::input(format!("{}:{}: {e}", path.display(), lineno + 1)))?;
        out.push(inst);
    }
    Ok(out)
}
