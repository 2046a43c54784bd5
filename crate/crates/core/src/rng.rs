//! Seeded randomness.
//!
//! All randomness flows from [`seeded_rng`]. The generator is ChaCha8, which
//! is portable across platforms and word sizes, so a seed fully determines
//! every stream and every run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Name recorded in run metadata.
pub const RNG_NAME: &str = "ChaCha8";

pub type StreamRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// An independent sub-stream of the same seed. Used where a component needs
/// draws that must not disturb the main sequence.
pub fn seeded_substream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Uniform on `[0, 1)`.
pub fn uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random::<f64>()
}
