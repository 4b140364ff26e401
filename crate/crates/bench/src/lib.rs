//! Seeded inputs shared by the benchmarks.

use probmet_core::gen;
use probmet_core::{levels::levels_of, FinitePMSpace, LevelFamily, TNorm};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A valid chain space with `n` points and up to `k` jumps per pair.
pub fn space(n: usize, k: usize, tnorm: TNorm, seed: u64) -> FinitePMSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    gen::chain_space(&mut rng, n, k, tnorm, false)
}

/// The level family of [`space`].
pub fn family(n: usize, k: usize, tnorm: TNorm, seed: u64) -> LevelFamily {
    levels_of(&space(n, k, tnorm, seed))
}

/// Sizes `(points, jumps)` used across the benchmark groups.
pub const SIZES: [(usize, usize); 4] = [(3, 2), (6, 4), (10, 8), (16, 8)];

#[cfg(test)]
mod tests {
    use super::*;
    use probmet_core::{check_level_axioms, check_pm_axioms};

    #[test]
    fn inputs_are_valid() {
        for (n, k) in SIZES {
            assert!(check_pm_axioms(&space(n, k, TNorm::Product, 1)).passed());
            assert!(check_level_axioms(&family(n, k, TNorm::Minimum, 2)).passed());
        }
    }
}
