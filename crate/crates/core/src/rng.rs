//! Seeded randomness.
//!
//! All randomness comes from ChaCha8 (`rand_chacha`), which produces the same
//! stream on every platform. Independent sub-streams are derived from a base
//! seed either through ChaCha's 64-bit stream selector or through
//! [`derive_seed`], a SplitMix64 hash of the seed and a label.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for sub-stream `stream` of `seed`.
pub fn seeded_stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic child seed for `(seed, label)`.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    label
        .bytes()
        .fold(splitmix64(seed), |h, b| splitmix64(h ^ u64::from(b)))
}
