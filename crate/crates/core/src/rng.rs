//! Seeding.
//!
//! Every random draw in the crate comes from a [`ChaCha8Rng`], a counter-based
//! stream cipher generator, so results depend only on the seed and never on
//! thread scheduling.
//!
//! Stream splitting: a [`Seed`] is a 64-bit value. Child seeds are derived
//! with [`Seed::derive`], which mixes the parent and a tag through the
//! SplitMix64 finalizer. An experiment with base seed `s` gives trial `t` the
//! seed `s.derive(t)`, and each consumer inside a trial (data generation,
//! shuffling, initialization, ...) derives again with its own fixed tag.
//! Because derivation is a pure function, parallel trials reproduce exactly.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Seed {
    /// Child seed for `tag`. Distinct tags give statistically independent streams.
    pub fn derive(self, tag: u64) -> Seed {
        Seed(splitmix64(self.0 ^ splitmix64(tag.wrapping_add(0x632B_E59B_D9B4_E019))))
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}

/// Fixed tags for the consumers inside one trial.
pub mod tags {
    pub const DATA: u64 = 1;
    pub const TEST_DATA: u64 = 2;
    pub const CV_SPLIT: u64 = 3;
    pub const INIT: u64 = 4;
    pub const SHUFFLE: u64 = 5;
    pub const PARAMS: u64 = 6;
}
