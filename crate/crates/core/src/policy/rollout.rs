//! Rollout sampling and group-relative advantage normalization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const ADVANTAGE_EPSILON: f64 = 1e-8;

/// Sample `k` boolean selection vectors, each bit drawn independently as
/// Bernoulli(p_i) from a seeded generator. The draw order is fixed (rollout
/// by rollout, bit by bit), so identical seeds reproduce identical matrices.
pub fn sample_rollouts(probs: &[f64], k: usize, seed: u64) -> Vec<Vec<bool>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..k)
        .map(|_| probs.iter().map(|p| rng.gen::<f64>() < *p).collect())
        .collect()
}

/// Group-relative advantages: `(r - mean) / (population std + epsilon)`.
/// Equal rewards (including the single-rollout case) yield all zeros.
pub fn advantages(rewards: &[f64], epsilon: f64) -> Vec<f64> {
    let k = rewards.len();
    if k == 0 {
        return Vec::new();
    }
    let mean = rewards.iter().sum::<f64>() / k as f64;
    let variance = rewards.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / k as f64;
    let denom = variance.sqrt() + epsilon;
    rewards.iter().map(|r| (r - mean) / denom).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_probabilities_force_all_ones() {
        let rollouts = sample_rollouts(&[1.0, 1.0, 1.0], 5, 42);
        assert!(rollouts.iter().all(|r| r.iter().all(|&b| b)));
        let rollouts = sample_rollouts(&[0.0, 0.0], 5, 42);
        assert!(rollouts.iter().all(|r| r.iter().all(|&b| !b)));
    }

    #[test]
    fn same_seed_reproduces_rollouts() {
        let a = sample_rollouts(&[0.3, 0.6, 0.9], 20, 7);
        let b = sample_rollouts(&[0.3, 0.6, 0.9], 20, 7);
        assert_eq!(a, b);
        let c = sample_rollouts(&[0.3, 0.6, 0.9], 20, 8);
        assert_ne!(a, c);
    }

    #[test]
    fn half_probabilities_hit_expected_frequency() {
        let k = 10_000;
        let rollouts = sample_rollouts(&[0.5, 0.5, 0.5], k, 123);
        for pos in 0..3 {
            let freq = rollouts.iter().filter(|r| r[pos]).count() as f64 / k as f64;
            assert!((freq - 0.5).abs() < 0.02, "position {pos} frequency {freq}");
        }
    }

    #[test]
    fn advantages_hand_values() {
        let adv = advantages(&[1.5, 0.5, 1.0], ADVANTAGE_EPSILON);
        assert!((adv[0] - 1.2247448713915887).abs() < 1e-6);
        assert!((adv[1] + 1.2247448713915887).abs() < 1e-6);
        assert!(adv[2].abs() < 1e-9);
    }

    #[test]
    fn equal_rewards_yield_zero_advantages() {
        let adv = advantages(&[0.7; 6], ADVANTAGE_EPSILON);
        assert!(adv.iter().all(|a| *a == 0.0));
        let adv = advantages(&[1.3], ADVANTAGE_EPSILON);
        assert_eq!(adv, vec![0.0]);
    }

    #[test]
    fn advantages_sum_to_zero_when_varied() {
        let rewards = [0.1, 0.9, 0.4, 1.3, 0.0];
        let adv = advantages(&rewards, ADVANTAGE_EPSILON);
        let total: f64 = adv.iter().sum();
        assert!(total.abs() < 1e-9 * rewards.len() as f64);
    }
}
