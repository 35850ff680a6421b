//! Seeded randomness.
//!
//! Every instance is generated from one [`InstanceRng`]: ChaCha8 seeded with
//! `ChaCha8Rng::seed_from_u64(seed)`. Integer draws use the rejection rule of
//! [`InstanceRng::below`], real draws use the top 53 bits of a 64-bit word.
//! Nothing here depends on the sampling helpers of the `rand` crate, so the
//! draw sequence is fixed by this file alone.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer. A bijection on `u64`.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the `index`-th stream under `base_seed`:
/// `mix64(mix64(base_seed) + (index + 1) * 0x9E3779B97F4A7C15)` with
/// wrapping arithmetic.
///
/// For a fixed base the map `index -> seed` is injective, since both the
/// odd-multiplier step and `mix64` are bijections.
pub fn derive_stream(base_seed: u64, index: u64) -> u64 {
    mix64(mix64(base_seed).wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

#[derive(Debug, Clone)]
pub struct InstanceRng {
    inner: ChaCha8Rng,
}

impl InstanceRng {
    pub fn new(seed: u64) -> Self {
        InstanceRng {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform integer in `[0, bound)`; draws below `2^64 mod bound` are
    /// rejected so every residue is equally likely.
    #[inline]
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let x = self.next_u64();
            if x >= threshold {
                return x % bound;
            }
        }
    }

    /// Uniform real in `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// `true` with probability `p`.
    #[inline]
    pub fn coin(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    /// Ordered sample of `k` distinct indices from `[0, n)` by partial
    /// Fisher-Yates: position `i` swaps with a uniform position in `[i, n)`.
    pub fn partial_shuffle(&mut self, n: usize, k: usize) -> Vec<usize> {
        assert!(k <= n);
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.below((n - i) as u64) as usize;
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool
    }

    /// Uniform `q`-subset of `[0, n)` by Floyd's algorithm, returned sorted.
    ///
    /// For `j` in `n-q .. n`: draw `t` uniform in `[0, j]`; insert `t`
    /// unless already present, in which case insert `j`.
    pub fn floyd_subset(&mut self, n: u64, q: u64) -> Vec<u64> {
        assert!(q <= n);
        let mut chosen: Vec<u64> = Vec::with_capacity(q as usize);
        // dense marker when affordable, sorted-vec lookup otherwise
        if n <= 1 << 22 {
            let mut seen = vec![false; n as usize];
            for j in (n - q)..n {
                let t = self.below(j + 1);
                let pick = if seen[t as usize] { j } else { t };
                seen[pick as usize] = true;
                chosen.push(pick);
            }
        } else {
            let mut seen = std::collections::HashSet::with_capacity(q as usize);
            for j in (n - q)..n {
                let t = self.below(j + 1);
                let pick = if seen.contains(&t) { j } else { t };
                seen.insert(pick);
                chosen.push(pick);
            }
        }
        chosen.sort_unstable();
        chosen
    }
}
