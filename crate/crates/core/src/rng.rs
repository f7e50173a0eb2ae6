//! Seeded random streams.
//!
//! Every stochastic routine takes a `u64` seed. Independent streams for parallel
//! Monte-Carlo trials are derived from one seed via the ChaCha stream id, so a
//! trial's draws never depend on how trials are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type StreamRng = ChaCha8Rng;

/// Stream 0 of `seed`.
pub fn seeded(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` of `seed`.
pub fn stream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[inline]
pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

#[inline]
pub fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Fisher-Yates shuffle of `0..n` into `perm`.
pub fn shuffle_indices<R: Rng + ?Sized>(rng: &mut R, perm: &mut [usize]) {
    use rand::seq::SliceRandom;
    perm.shuffle(rng);
}
