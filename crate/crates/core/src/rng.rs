//! Seed derivation for reproducible, order-independent RNG streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the stream identified by `(seed, label, salt)`.
///
/// Uses FNV-1a over the label so the value is stable across platforms and
/// compiler versions.
pub fn stream_seed(seed: u64, label: &str, salt: u64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    splitmix64(splitmix64(seed ^ h).wrapping_add(salt))
}

pub fn stream(seed: u64, label: &str, salt: u64) -> StreamRng {
    StreamRng::seed_from_u64(stream_seed(seed, label, salt))
}
