//! Logistic policy head: per-conclusion selection probabilities and
//! rollout log-probabilities.

use super::{SelectionInstance, WifParams};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Probabilities are clamped into `[PROB_CLAMP, 1 - PROB_CLAMP]` so
/// log-probabilities stay finite.
pub const PROB_CLAMP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyParams {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl PolicyParams {
    pub fn zeros(dim: usize) -> Self {
        Self {
            weights: vec![0.0; dim],
            bias: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn is_finite(&self) -> bool {
        self.bias.is_finite() && self.weights.iter().all(|w| w.is_finite())
    }
}

fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Per-conclusion selection probabilities `p_i = logistic(w·f_i + b)`,
/// clamped away from 0 and 1.
pub fn selection_probs(params: &PolicyParams, inst: &SelectionInstance) -> Result<Vec<f64>> {
    if inst.dim() != params.dim() {
        return Err(Error::input(format!(
            "feature dimension {} does not match policy dimension {}",
            inst.dim(),
            params.dim()
        )));
    }
    Ok(inst
        .features
        .iter()
        .map(|f| {
            let z = params.bias
                + params
                    .weights
                    .iter()
                    .zip(f.iter())
                    .map(|(w, x)| w * x)
                    .sum::<f64>();
            logistic(z).clamp(PROB_CLAMP, 1.0 - PROB_CLAMP)
        })
        .collect())
}

/// Log-probability of a selection under independent Bernoulli draws:
/// sum of `log p_i` over selected plus `log (1 - p_i)` over unselected.
pub fn log_prob(probs: &[f64], selection: &[bool]) -> f64 {
    debug_assert_eq!(probs.len(), selection.len());
    probs
        .iter()
        .zip(selection.iter())
        .map(|(p, s)| if *s { p.ln() } else { (1.0 - p).ln() })
        .sum()
}

/// Persisted policy: parameters plus the WIF configuration and the training
/// config fingerprint they were produced under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyFile {
    pub dim: usize,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub wif_params: WifParams,
    pub fingerprint: String,
}

impl PolicyFile {
    pub fn new(params: &PolicyParams, wif: WifParams, fingerprint: &str) -> Self {
        Self {
            dim: params.dim(),
            weights: params.weights.clone(),
            bias: params.bias,
            wif_params: wif,
            fingerprint: fingerprint.to_string(),
        }
    }

    pub fn params(&self) -> PolicyParams {
        PolicyParams {
            weights: self.weights.clone(),
            bias: self.bias,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = serde_json::to_string_pretty(self)?;
        out.push('\n');
        std::fs::write(path, out)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| Error::input(format!("cannot read policy {}: {e}", path.display())))?;
        let file: PolicyFile = serde_json::from_str(&raw)
            .map_err(|e| Error::input(format!("malformed policy file {}: {e}", path.display())))?;
        if file.weights.len() != file.dim {
            return Err(Error::input(format!(
                "policy file {} declares dim {} but has {} weights",
                path.display(),
                file.dim,
                file.weights.len()
            )));
        }
        Ok(file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::RoleLabels;

    fn inst(features: Vec<Vec<f64>>) -> SelectionInstance {
        let n = features.len();
        SelectionInstance::new(
            "q",
            features,
            RoleLabels::new(0..n, [], []),
        )
        .unwrap()
    }

    #[test]
    fn zero_params_give_half_probabilities() {
        let instance = inst(vec![vec![1.0, -2.0], vec![0.3, 0.7]]);
        let probs = selection_probs(&PolicyParams::zeros(2), &instance).unwrap();
        assert_eq!(probs, vec![0.5, 0.5]);
    }

    #[test]
    fn large_bias_saturates_to_clamp() {
        let instance = inst(vec![vec![0.0]]);
        let params = PolicyParams {
            weights: vec![0.0],
            bias: 30.0,
        };
        let probs = selection_probs(&params, &instance).unwrap();
        assert_eq!(probs[0], 1.0 - PROB_CLAMP);
    }

    #[test]
    fn logistic_of_two() {
        let instance = inst(vec![vec![1.0]]);
        let flat = selection_probs(&PolicyParams::zeros(1), &instance).unwrap();
        assert_eq!(flat[0], 0.5);
        let weighted = selection_probs(
            &PolicyParams {
                weights: vec![2.0],
                bias: 0.0,
            },
            &instance,
        )
        .unwrap();
        assert!((weighted[0] - 0.8807970779778823).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_input_error() {
        let instance = inst(vec![vec![1.0, 2.0]]);
        assert!(selection_probs(&PolicyParams::zeros(3), &instance).is_err());
    }

    #[test]
    fn log_prob_hand_values() {
        let lp = log_prob(&[0.5, 0.5], &[true, false]);
        assert!((lp - (-1.3862943611198906)).abs() < 1e-9);
        let lp = log_prob(&[0.9], &[false]);
        assert!((lp - (-2.302585092994046)).abs() < 1e-9);
    }

    #[test]
    fn log_prob_of_certain_selection_is_near_zero() {
        let p = 1.0 - PROB_CLAMP;
        let lp = log_prob(&[p, p, p], &[true, true, true]);
        assert!(lp <= 0.0 && lp > -1e-5);
    }

    #[test]
    fn policy_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("policy.json");
        let params = PolicyParams {
            weights: vec![0.25, -1.5],
            bias: 0.125,
        };
        let file = PolicyFile::new(&params, WifParams::default(), "abc123");
        file.save(&path).unwrap();
        let loaded = PolicyFile::load(&path).unwrap();
        assert_eq!(loaded, file);
        assert_eq!(loaded.params(), params);
    }
}
