//! Seeded random streams.
//!
//! Every simulation draws from [`SimRng`], ChaCha20 as implemented by
//! `rand_chacha` 0.9. A stream is fully identified by a 64-bit seed and a
//! 64-bit stream id: the seed is expanded to the 256-bit ChaCha key with
//! `rand_core`'s PCG32-based `seed_from_u64`, and the stream id selects the
//! ChaCha nonce. Runs of one experiment share the base seed and use their
//! repetition index as stream id, so streams never overlap.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub type SimRng = ChaCha20Rng;

/// Algorithm identity recorded in experiment metadata.
pub const RNG_ALGORITHM: &str = "chacha20/rand_chacha-0.9/seed_from_u64+stream";

pub fn stream(seed: u64, stream_id: u64) -> SimRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}

pub fn seeded(seed: u64) -> SimRng {
    stream(seed, 0)
}
