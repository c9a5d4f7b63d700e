//! Keyed pair randomness.
//!
//! A pair value is `h = (H1 << 32) | H2` where `H1` depends only on two
//! per-vertex 32-bit keys through a symmetric mix and `H2` on the ordered id
//! pair. The uniform is the top 53 bits of `h`, so `u < q` forces
//! `H1 <= floor(q * 2^32)`. Builders use that as a cheap exact prefilter.

use crate::{CoreError, Result, SeedSpec, Stream};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline(always)]
pub fn fmix32(mut h: u32) -> u32 {
    h ^= h >> 16;
    h = h.wrapping_mul(0x85eb_ca6b);
    h ^= h >> 13;
    h = h.wrapping_mul(0xc2b2_ae35);
    h ^ (h >> 16)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairHasher {
    key: u64,
    key2: u64,
    k32: u32,
}

impl PairHasher {
    pub fn new(seed: &SeedSpec) -> Self {
        let key = seed.key(Stream::Edges);
        let key2 = splitmix64(key ^ 0x2545_F491_4F6C_DD1D);
        PairHasher { key, key2, k32: (splitmix64(key2) >> 32) as u32 }
    }

    /// Per-vertex key entering the symmetric high word.
    #[inline]
    pub fn vertex_key(&self, id: u32) -> u32 {
        (splitmix64(self.key ^ (id as u64).wrapping_mul(GOLDEN)) >> 32) as u32
    }

    #[inline(always)]
    pub fn high(&self, ga: u32, gb: u32) -> u32 {
        high_word(self.k32, ga, gb)
    }

    #[inline]
    pub fn low(&self, i: u32, j: u32) -> u32 {
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        splitmix64(self.key2 ^ (((lo as u64) << 32) | hi as u64)) as u32
    }

    #[inline]
    pub fn bits(&self, i: u32, j: u32) -> u64 {
        let h1 = self.high(self.vertex_key(i), self.vertex_key(j));
        ((h1 as u64) << 32) | self.low(i, j) as u64
    }

    /// Same as [`uniform`](Self::uniform) with precomputed vertex keys.
    #[inline]
    pub fn uniform_with_keys(&self, i: u32, j: u32, gi: u32, gj: u32) -> f64 {
        let h = ((self.high(gi, gj) as u64) << 32) | self.low(i, j) as u64;
        bits_to_unit(h)
    }

    #[inline]
    pub fn uniform(&self, i: u32, j: u32) -> f64 {
        bits_to_unit(self.bits(i, j))
    }

    pub fn mix_key(&self) -> u32 {
        self.k32
    }

    /// Largest high word compatible with `u < q`.
    #[inline]
    pub fn high_threshold(q: f64) -> u32 {
        if q >= 1.0 {
            u32::MAX
        } else if q <= 0.0 {
            0
        } else {
            let t = (q * 4_294_967_296.0).floor();
            if t >= u32::MAX as f64 {
                u32::MAX
            } else {
                t as u32
            }
        }
    }
}

#[inline(always)]
pub(crate) fn high_word(k32: u32, ga: u32, gb: u32) -> u32 {
    fmix32(ga.wrapping_mul(gb).wrapping_add(ga ^ gb) ^ k32)
}

#[inline(always)]
fn bits_to_unit(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Symmetric, seed-keyed uniform on `[0,1)` for the unordered pair `{i, j}`.
pub fn pair_uniform(seed: &SeedSpec, i: u64, j: u64) -> Result<f64> {
    if i == j {
        return Err(CoreError::SelfPair(i));
    }
    if i > u32::MAX as u64 || j > u32::MAX as u64 {
        return Err(CoreError::TooManyPoints(i.max(j) + 1));
    }
    Ok(PairHasher::new(seed).uniform(i as u32, j as u32))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_and_self_rejected() {
        let s = SeedSpec::new(1);
        assert_eq!(pair_uniform(&s, 3, 7).unwrap(), pair_uniform(&s, 7, 3).unwrap());
        assert!(pair_uniform(&s, 4, 4).is_err());
    }

    #[test]
    fn prefilter_is_exact() {
        let h = PairHasher::new(&SeedSpec::new(99));
        for q in [1e-9, 1e-4, 0.013, 0.5, 0.999_999] {
            let t = PairHasher::high_threshold(q);
            for i in 0..300u32 {
                for j in (i + 1)..300 {
                    let u = h.uniform(i, j);
                    if u < q {
                        assert!(h.high(h.vertex_key(i), h.vertex_key(j)) <= t);
                    }
                }
            }
        }
    }
}
