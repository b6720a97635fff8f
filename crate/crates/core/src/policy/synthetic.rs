//! Synthetic separable benchmark for the selection policy.
//!
//! Feature 0 is a Core indicator and feature 1 a Noise indicator, so a
//! linear head can reach the analytic optimum (select exactly Core∪Support,
//! WIF = 1 + gamma). Remaining features are zero.

use super::wif::RoleLabels;
use super::{SelectionInstance, FEATURE_DIM};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Generate `count` instances with 1-3 cores, 1-2 supports, and 1-3 noises
/// each. Deterministic for a given seed.
pub fn separable_benchmark(count: usize, seed: u64) -> Vec<SelectionInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let cores = rng.gen_range(1..=3usize);
            let supports = rng.gen_range(1..=2usize);
            let noises = rng.gen_range(1..=3usize);
            let n = cores + supports + noises;
            let mut features = Vec::with_capacity(n);
            for idx in 0..n {
                let mut f = vec![0.0; FEATURE_DIM];
                if idx < cores {
                    f[0] = 1.0;
                } else if idx >= cores + supports {
                    f[1] = 1.0;
                }
                features.push(f);
            }
            let labels = RoleLabels::new(
                0..cores,
                cores..cores + supports,
                cores + supports..n,
            );
            SelectionInstance::new(&format!("synthetic-{i}"), features, labels)
                .expect("generated instance is valid")
        })
        .collect()
}
