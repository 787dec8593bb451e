//! Seed handling. Every stochastic stage derives its generator from one root
//! seed and a stage name, so stages can be re-run in isolation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StageRng = ChaCha8Rng;

#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the named substream `name` under `root`.
pub fn substream_seed(root: u64, name: &str) -> u64 {
    // FNV-1a over the name, then mixed with the root.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    splitmix64(root ^ splitmix64(h))
}

pub fn rng_from_seed(seed: u64) -> StageRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn substream(root: u64, name: &str) -> StageRng {
    rng_from_seed(substream_seed(root, name))
}

/// Counter-based uniform draw in [0, 1) for the pair `(i, j)`. Independent of
/// evaluation order, so parallel loops reproduce serial results.
#[inline]
pub fn pair_uniform(seed: u64, i: u64, j: u64) -> f64 {
    let key = splitmix64(seed ^ splitmix64(i.wrapping_mul(0xD1B5_4A32_D192_ED03) ^ j));
    (key >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
