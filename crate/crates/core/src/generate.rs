//! Seeded random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::model::Instance;
use crate::rational;

/// `n` jobs with integer times drawn uniformly from `0..=max_time`. The same
/// arguments always give the same instance.
pub fn generate(m: usize, k: usize, n: usize, max_time: u64, seed: u64) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..n)
        .map(|_| {
            (0..k)
                .map(|_| rational::int(rng.random_range(0..=max_time) as i64))
                .collect()
        })
        .collect();
    Instance::new(m, k, rows)
}

/// Like [`generate`] but with `m`, `k`, `n` also drawn from the given
/// inclusive ranges.
pub fn generate_in(
    m: (usize, usize),
    k: (usize, usize),
    n: (usize, usize),
    max_time: u64,
    seed: u64,
) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.random_range(m.0..=m.1);
    let k = rng.random_range(k.0..=k.1);
    let n = rng.random_range(n.0..=n.1);
    generate(m, k, n, max_time, rng.random())
}
