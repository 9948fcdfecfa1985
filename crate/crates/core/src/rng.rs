//! Portable seeded randomness.
//!
//! Every stochastic routine takes a `u64` seed and draws from a ChaCha8
//! stream (`rand_chacha`), whose output is specified bit-for-bit and does not
//! depend on platform or word size. Independent sub-streams (one per trial,
//! per attempt, ...) get their seed from [`derive_seed`], so parallel work
//! never shares generator state.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type IrlRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> IrlRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 output function.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the sub-stream addressed by `path` under `master`.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix(master), |acc, &p| {
        mix(acc ^ mix(p.wrapping_add(0x9e37_79b9_7f4a_7c15)))
    })
}

/// Index drawn from a probability vector by inverse CDF. Round-off that
/// leaves `u` beyond the last cumulative value lands on the last state with
/// positive mass.
pub fn sample_categorical<R: Rng + ?Sized>(rng: &mut R, probs: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (j, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return j;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1)
}

pub fn uniform_index<R: Rng + ?Sized>(rng: &mut R, n: usize) -> usize {
    rng.random_range(0..n)
}
