//! The seeded generator every randomised stage draws from.
//!
//! Algorithm `xoshiro256**-v1`:
//!
//! * state: xoshiro256** seeded from a `u64` by four SplitMix64 outputs
//!   (the reference seeding procedure);
//! * `uniform()`: `(next_u64() >> 11) * 2^-53`, in `[0, 1)`;
//! * `below(n)`: Lemire's multiply-high with rejection of the low product
//!   when it falls under `2^64 mod n`;
//! * `shuffle`: Fisher-Yates from the last element down, swapping `i` with
//!   `below(i + 1)`;
//! * `derive(seed, tags)`: folds each tag into the seed with one SplitMix64
//!   finaliser step, giving independent per-stage streams.
//!
//! Everything above is specified bit-for-bit so another implementation can
//! replay a run.

use rand::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

pub const RNG_NAME: &str = "xoshiro256**-v1";

#[derive(Debug, Clone)]
pub struct MeshRng(Xoshiro256StarStar);

impl MeshRng {
    pub fn new(seed: u64) -> Self {
        MeshRng(Xoshiro256StarStar::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `0..n`. `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let threshold = n.wrapping_neg() % n;
        loop {
            let m = (self.next_u64() as u128) * (n as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as u64;
            }
        }
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        p >= 1.0 || self.uniform() < p
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

fn splitmix_finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child seed for a tagged sub-stream of `seed`.
pub fn derive(seed: u64, tags: &[u64]) -> u64 {
    tags.iter().fold(seed, |acc, &t| {
        splitmix_finalize(acc.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(t.rotate_left(17)))
    })
}
