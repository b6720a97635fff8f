//! Weighted Inference F-score.
//!
//! Scores a selected subset of local conclusions against Core/Support/Noise
//! role labels:
//!
//! ```text
//! WIF(P) = Rc^alpha * (1 - Rn)^beta * (1 + gamma * Rs)
//! ```
//!
//! with Rc = |P∩C|/|C| (1 if C is empty), Rs = |P∩S|/|S| (0 if S is empty),
//! Rn = |P∩N|/|N| (0 if N is empty). The empty selection scores exactly 0 so
//! a policy can never profit from skipping every conclusion.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Reward exponents/weights, ordered alpha >= beta > gamma >= 0 so that core
/// coverage dominates, noise avoidance is enforced, and support inclusion is
/// mildly encouraged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WifParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for WifParams {
    fn default() -> Self {
        Self {
            alpha: 2.5,
            beta: 2.0,
            gamma: 0.5,
        }
    }
}

impl WifParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let params = Self { alpha, beta, gamma };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.alpha.is_finite()
            && self.beta.is_finite()
            && self.gamma.is_finite()
            && self.alpha >= self.beta
            && self.beta > self.gamma
            && self.gamma >= 0.0;
        if !ok {
            return Err(Error::input(format!(
                "wif params must satisfy alpha >= beta > gamma >= 0, got {:?}",
                self
            )));
        }
        Ok(())
    }

    /// Largest attainable WIF value.
    pub fn max_score(&self) -> f64 {
        1.0 + self.gamma
    }
}

/// Core/Support/Noise role labels over conclusion ids. The three sets are
/// pairwise disjoint and their union is the instance's conclusion universe.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RoleLabels {
    pub core: BTreeSet<usize>,
    pub support: BTreeSet<usize>,
    pub noise: BTreeSet<usize>,
}

impl RoleLabels {
    pub fn new(
        core: impl IntoIterator<Item = usize>,
        support: impl IntoIterator<Item = usize>,
        noise: impl IntoIterator<Item = usize>,
    ) -> Self {
        Self {
            core: core.into_iter().collect(),
            support: support.into_iter().collect(),
            noise: noise.into_iter().collect(),
        }
    }

    pub fn universe(&self) -> BTreeSet<usize> {
        self.core
            .union(&self.support)
            .chain(self.noise.iter())
            .copied()
            .collect()
    }

    /// Check pairwise disjointness and, when `expected_len` is known, that
    /// the universe is exactly `0..expected_len`.
    pub fn validate(&self, expected_len: usize) -> Result<()> {
        let total = self.core.len() + self.support.len() + self.noise.len();
        let universe = self.universe();
        if universe.len() != total {
            return Err(Error::input("role labels overlap across core/support/noise"));
        }
        let expected: BTreeSet<usize> = (0..expected_len).collect();
        if universe != expected {
            return Err(Error::input(format!(
                "role labels cover {:?}, expected 0..{}",
                universe, expected_len
            )));
        }
        Ok(())
    }
}

/// Evaluate WIF for a selection. Ids outside the label universe are an input
/// error; the empty selection scores 0.
pub fn wif_score(
    selection: &BTreeSet<usize>,
    labels: &RoleLabels,
    params: &WifParams,
) -> Result<f64> {
    let universe = labels.universe();
    if let Some(bad) = selection.iter().find(|id| !universe.contains(id)) {
        return Err(Error::input(format!(
            "selection contains unknown conclusion id {bad}"
        )));
    }
    if selection.is_empty() {
        return Ok(0.0);
    }
    let recall = |set: &BTreeSet<usize>, empty_value: f64| -> f64 {
        if set.is_empty() {
            empty_value
        } else {
            selection.intersection(set).count() as f64 / set.len() as f64
        }
    };
    let core_recall = recall(&labels.core, 1.0);
    let support_recall = recall(&labels.support, 0.0);
    let noise_recall = recall(&labels.noise, 0.0);
    Ok(core_recall.powf(params.alpha)
        * (1.0 - noise_recall).powf(params.beta)
        * (1.0 + params.gamma * support_recall))
}
