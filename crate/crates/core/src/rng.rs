//! Seeded random streams.
//!
//! The crate pins xoshiro256++ seeded through SplitMix64 (`seed_from_u64`).
//! Independent streams are derived with [`mix_seed`], a pure function of the
//! master seed and a stream index, so a parallel schedule never changes which
//! numbers a replicate sees.

use rand_core::{RngCore, SeedableRng};
pub use rand_xoshiro::Xoshiro256PlusPlus as GwRng;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives the seed of stream `stream_index` from `master_seed`.
pub fn mix_seed(master_seed: u64, stream_index: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(stream_index).rotate_left(17))
}

pub fn rng_from_seed(seed: u64) -> GwRng {
    GwRng::seed_from_u64(seed)
}

/// Stream for one Monte Carlo replicate.
pub fn replicate_rng(master_seed: u64, size_index: u64, replicate_index: u64) -> GwRng {
    rng_from_seed(mix_seed(mix_seed(master_seed, size_index), replicate_index))
}

/// Uniform integer in `0..n` (Lemire's multiply-shift; bias below 2^-40 for
/// the small `n` used here).
#[inline]
pub fn uniform_below<R: RngCore + ?Sized>(rng: &mut R, n: u64) -> u64 {
    ((rng.next_u64() as u128 * n as u128) >> 64) as u64
}
