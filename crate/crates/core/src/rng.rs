//! Seed derivation. Every random stream in a run is keyed by a base seed plus
//! a small tuple of integers, so draws do not depend on evaluation order.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

pub type StreamRng = Xoshiro256PlusPlus;

#[inline]
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hashes a seed together with a key tuple into a new 64-bit seed.
#[inline]
pub fn derive(seed: u64, key: &[u64]) -> u64 {
    key.iter().fold(splitmix(seed), |h, &k| splitmix(h ^ splitmix(k)))
}

/// Hashes a label into a stream tag.
pub fn tag(label: &str) -> u64 {
    label
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

#[inline]
pub fn stream(seed: u64, key: &[u64]) -> StreamRng {
    StreamRng::seed_from_u64(derive(seed, key))
}
