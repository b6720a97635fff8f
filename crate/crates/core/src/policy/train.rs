//! Policy-gradient training loop.
//!
//! Each step samples K rollouts from the current Bernoulli policy, scores
//! them with WIF, normalizes rewards into group-relative advantages, and
//! descends the score-function gradient of
//!
//! ```text
//! L = -(1/K) * sum_k A_k * log pi(P_k)
//! ```
//!
//! holding the advantages constant. Plain gradient descent keeps runs
//! bit-reproducible for a given seed.

use super::model::{log_prob, selection_probs, PolicyParams};
use super::rollout::{advantages, sample_rollouts, ADVANTAGE_EPSILON};
use super::wif::{wif_score, WifParams};
use super::SelectionInstance;
use crate::error::{Error, Result};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub rollouts: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    pub wif: WifParams,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            rollouts: 8,
            learning_rate: 0.1,
            epochs: 10,
            seed: 0,
            wif: WifParams::default(),
        }
    }
}

fn selection_set(rollout: &[bool]) -> BTreeSet<usize> {
    rollout
        .iter()
        .enumerate()
        .filter(|(_, s)| **s)
        .map(|(i, _)| i)
        .collect()
}

/// One policy-gradient update on a single instance. Returns the updated
/// parameters and the mean rollout reward observed before the update.
pub fn policy_gradient_step(
    params: &PolicyParams,
    inst: &SelectionInstance,
    wif: &WifParams,
    rollouts: usize,
    learning_rate: f64,
    seed: u64,
) -> Result<(PolicyParams, f64)> {
    if rollouts == 0 {
        return Err(Error::Train("rollout count must be >= 1".into()));
    }
    let probs = selection_probs(params, inst)?;
    let samples = sample_rollouts(&probs, rollouts, seed);
    let rewards = samples
        .iter()
        .map(|s| wif_score(&selection_set(s), &inst.labels, wif))
        .collect::<Result<Vec<f64>>>()?;
    let mean_reward = rewards.iter().sum::<f64>() / rollouts as f64;
    let advs = advantages(&rewards, ADVANTAGE_EPSILON);

    // dL/dz_i = -(1/K) sum_k A_k (s_ki - p_i); chain through z = w·f + b.
    let dim = params.dim();
    let mut grad_w = vec![0.0f64; dim];
    let mut grad_b = 0.0f64;
    for (sample, adv) in samples.iter().zip(advs.iter()) {
        for (i, selected) in sample.iter().enumerate() {
            let score = (if *selected { 1.0 } else { 0.0 }) - probs[i];
            let coeff = -adv * score / rollouts as f64;
            for (gw, x) in grad_w.iter_mut().zip(inst.features[i].iter()) {
                *gw += coeff * x;
            }
            grad_b += coeff;
        }
    }
    if !grad_b.is_finite() || grad_w.iter().any(|g| !g.is_finite()) {
        return Err(Error::Train(format!(
            "non-finite gradient on instance {} (rewards {:?})",
            inst.question_id, rewards
        )));
    }

    let updated = PolicyParams {
        weights: params
            .weights
            .iter()
            .zip(grad_w.iter())
            .map(|(w, g)| w - learning_rate * g)
            .collect(),
        bias: params.bias - learning_rate * grad_b,
    };
    if !updated.is_finite() {
        return Err(Error::Train("parameters diverged to non-finite values".into()));
    }
    Ok((updated, mean_reward))
}

/// Train a policy from zero-initialized parameters over shuffled epochs.
/// Returns the final parameters and the per-epoch mean rollout reward.
pub fn train_policy(
    dataset: &[SelectionInstance],
    cfg: &TrainConfig,
) -> Result<(PolicyParams, Vec<f64>)> {
    if dataset.is_empty() {
        return Err(Error::input("training dataset is empty"));
    }
    let dim = dataset[0].dim();
    for inst in dataset {
        inst.validate()?;
        if inst.dim() != dim {
            return Err(Error::input(format!(
                "instance {} has feature dimension {} (expected {})",
                inst.question_id,
                inst.dim(),
                dim
            )));
        }
    }
    cfg.wif.validate()?;

    let mut params = PolicyParams::zeros(dim);
    let mut history = Vec::with_capacity(cfg.epochs);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut epoch_reward = 0.0;
        for &idx in &order {
            let step_seed = rng.gen::<u64>();
            let (next, reward) = policy_gradient_step(
                &params,
                &dataset[idx],
                &cfg.wif,
                cfg.rollouts,
                cfg.learning_rate,
                step_seed,
            )?;
            params = next;
            epoch_reward += reward;
        }
        history.push(epoch_reward / dataset.len() as f64);
    }
    Ok((params, history))
}

/// Mean sampled WIF of `params` over a dataset without updating anything.
/// Used as the zero-initialization baseline in benchmark comparisons.
pub fn mean_sampled_reward(
    params: &PolicyParams,
    dataset: &[SelectionInstance],
    wif: &WifParams,
    rollouts: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0.0;
    for inst in dataset {
        let probs = selection_probs(params, inst)?;
        let samples = sample_rollouts(&probs, rollouts, rng.gen::<u64>());
        for s in &samples {
            total += wif_score(&selection_set(s), &inst.labels, wif)?;
        }
    }
    Ok(total / (dataset.len() * rollouts) as f64)
}

/// Loss value at fixed rollouts and advantages. Shared by the trainer's
/// finite-difference checks; recomputes probabilities from scratch.
pub fn loss_at(
    params: &PolicyParams,
    inst: &SelectionInstance,
    samples: &[Vec<bool>],
    advs: &[f64],
) -> Result<f64> {
    let probs = selection_probs(params, inst)?;
    let total: f64 = samples
        .iter()
        .zip(advs.iter())
        .map(|(s, a)| a * log_prob(&probs, s))
        .sum();
    Ok(-total / samples.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::RoleLabels;

    fn two_conclusion_instance() -> SelectionInstance {
        SelectionInstance::new(
            "q",
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            RoleLabels::new([0], [], [1]),
        )
        .unwrap()
    }

    #[test]
    fn equal_rewards_leave_params_unchanged() {
        // All-core labels: every non-empty rollout sees reward keyed only to
        // core recall; with a single conclusion always selected (p clamped
        // high) rewards are identical, advantages zero, update a no-op.
        let inst = SelectionInstance::new(
            "q",
            vec![vec![1.0]],
            RoleLabels::new([0], [], []),
        )
        .unwrap();
        let start = PolicyParams {
            weights: vec![40.0],
            bias: 0.0,
        };
        let (updated, reward) =
            policy_gradient_step(&start, &inst, &WifParams::default(), 8, 0.1, 3).unwrap();
        assert_eq!(updated, start);
        assert!((reward - 1.0).abs() < 1e-12);
    }

    #[test]
    fn step_moves_toward_core_and_away_from_noise() {
        let inst = two_conclusion_instance();
        let mut params = PolicyParams::zeros(2);
        for step in 0..200 {
            let (next, _) =
                policy_gradient_step(&params, &inst, &WifParams::default(), 8, 0.1, step).unwrap();
            params = next;
        }
        assert!(params.weights[0] > 0.5, "core weight {:?}", params.weights);
        assert!(params.weights[1] < -0.5, "noise weight {:?}", params.weights);
    }

    #[test]
    fn gradient_matches_finite_differences_spot_check() {
        let inst = two_conclusion_instance();
        let params = PolicyParams {
            weights: vec![0.3, -0.2],
            bias: 0.1,
        };
        let probs = selection_probs(&params, &inst).unwrap();
        let samples = sample_rollouts(&probs, 8, 11);
        let rewards: Vec<f64> = samples
            .iter()
            .map(|s| wif_score(&selection_set(s), &inst.labels, &WifParams::default()).unwrap())
            .collect();
        let advs = advantages(&rewards, ADVANTAGE_EPSILON);

        // Analytic gradient, mirrored from policy_gradient_step.
        let mut grad = vec![0.0f64; 3];
        for (sample, adv) in samples.iter().zip(advs.iter()) {
            for (i, selected) in sample.iter().enumerate() {
                let score = (if *selected { 1.0 } else { 0.0 }) - probs[i];
                let coeff = -adv * score / samples.len() as f64;
                grad[0] += coeff * inst.features[i][0];
                grad[1] += coeff * inst.features[i][1];
                grad[2] += coeff;
            }
        }

        let h = 1e-6;
        for dim in 0..3 {
            let mut plus = params.clone();
            let mut minus = params.clone();
            match dim {
                0 | 1 => {
                    plus.weights[dim] += h;
                    minus.weights[dim] -= h;
                }
                _ => {
                    plus.bias += h;
                    minus.bias -= h;
                }
            }
            let numeric = (loss_at(&plus, &inst, &samples, &advs).unwrap()
                - loss_at(&minus, &inst, &samples, &advs).unwrap())
                / (2.0 * h);
            let denom = grad[dim].abs().max(1e-8);
            assert!(
                ((numeric - grad[dim]) / denom).abs() < 1e-4,
                "dim {dim}: numeric {numeric} vs analytic {}",
                grad[dim]
            );
        }
    }

    #[test]
    fn zero_epochs_is_a_no_op() {
        let dataset = vec![two_conclusion_instance()];
        let cfg = TrainConfig {
            epochs: 0,
            ..TrainConfig::default()
        };
        let (params, history) = train_policy(&dataset, &cfg).unwrap();
        assert_eq!(params, PolicyParams::zeros(2));
        assert!(history.is_empty());
    }

    #[test]
    fn training_is_deterministic_for_a_seed() {
        let dataset = vec![two_conclusion_instance(); 4];
        let cfg = TrainConfig {
            epochs: 3,
            seed: 99,
            ..TrainConfig::default()
        };
        let (p1, h1) = train_policy(&dataset, &cfg).unwrap();
        let (p2, h2) = train_policy(&dataset, &cfg).unwrap();
        assert_eq!(p1, p2);
        assert_eq!(h1, h2);
    }

    #[test]
    fn mixed_dimensions_rejected() {
        let a = two_conclusion_instance();
        let b = SelectionInstance::new(
            "q2",
            vec![vec![1.0]],
            RoleLabels::new([0], [], []),
        )
        .unwrap();
        let err = train_policy(&[a, b], &TrainConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Input(_)));
    }
}
