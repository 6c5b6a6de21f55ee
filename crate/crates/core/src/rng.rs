//! Deterministic seeding.
//!
//! Every parallel task draws from its own generator whose seed is derived from
//! the master seed and the task's coordinates, so results never depend on how
//! work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Mixes `parts` into `master` to obtain an independent per-task seed.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix64(master), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

pub fn derived(master: u64, parts: &[u64]) -> Rng {
    seeded(derive_seed(master, parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng as _;

    #[test]
    fn derivation_is_stable_and_order_sensitive() {
        assert_eq!(derive_seed(7, &[1, 2]), derive_seed(7, &[1, 2]));
        assert_ne!(derive_seed(7, &[1, 2]), derive_seed(7, &[2, 1]));
        assert_ne!(derive_seed(7, &[0]), derive_seed(8, &[0]));
        let a: u64 = derived(3, &[4]).random();
        let b: u64 = derived(3, &[4]).random();
        assert_eq!(a, b);
    }
}
