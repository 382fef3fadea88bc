//! General-purpose minimal perfect hashing over 64-bit hashable keys.
//!
//! Multi-level collision filtering: level `l` hashes its surviving keys into
//! `γ·n_l` slots and keeps the keys that land alone. The slot bits of all
//! levels are concatenated into one rank-supported bit vector, so the index
//! of a placed key is the rank of its slot. Keys still colliding after the
//! last level go to a sorted fingerprint table appended after the placed keys.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::kmer::{mix64, Kmer};
use crate::persist::{expect, read_u64, read_words, write_u64, write_words, Persist};
use crate::succinct::{BitBuilder, RankBitvector};

pub const DEFAULT_GAMMA: f64 = 2.0;
const MAX_LEVELS: usize = 12;
const MAX_ATTEMPTS: u32 = 16;

/// A key that can be hashed to 64 bits under any seed.
pub trait MphfKey: Copy + Eq + Ord {
    fn hash64(&self, seed: u64) -> u64;
}

impl MphfKey for u64 {
    #[inline]
    fn hash64(&self, seed: u64) -> u64 {
        mix64((*self ^ seed).wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }
}

impl MphfKey for u128 {
    #[inline]
    fn hash64(&self, seed: u64) -> u64 {
        let hi = ((*self >> 64) as u64).hash64(seed);
        (*self as u64).hash64(hi)
    }
}

impl MphfKey for Kmer {
    #[inline]
    fn hash64(&self, seed: u64) -> u64 {
        self.packed().hash64(seed)
    }
}

#[inline]
fn reduce(h: u64, n: u64) -> u64 {
    ((h as u128 * n as u128) >> 64) as u64
}

#[inline]
fn level_seed(seed: u64, level: usize) -> u64 {
    mix64(seed ^ (level as u64 + 1).wrapping_mul(0xd6e8_feb8_6659_fd93))
}

#[inline]
fn residual_seed(seed: u64) -> u64 {
    level_seed(seed, usize::MAX >> 1)
}

/// Minimal perfect hash function built by [`GeneralMphf::build`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GeneralMphf {
    num_keys: u64,
    seed: u64,
    gamma: f64,
    // level l occupies bits [offsets[l], offsets[l + 1])
    offsets: Vec<u64>,
    bits: RankBitvector,
    placed: u64,
    residual: Vec<u64>,
}

impl GeneralMphf {
    pub fn build<K: MphfKey>(keys: &[K], gamma: f64, seed: u64) -> Result<Self> {
        if gamma.is_nan() || gamma < 1.0 {
            return Err(Error::InvalidParams(format!(
                "gamma={gamma} must be at least 1"
            )));
        }
        let mut seed = seed;
        for attempt in 1..=MAX_ATTEMPTS {
            match Self::try_build(keys, gamma, seed)? {
                Some(f) => return Ok(f),
                None => {
                    log::debug!("fingerprint collision in MPHF residual, attempt {attempt}");
                    seed = mix64(seed.wrapping_add(attempt as u64));
                }
            }
        }
        Err(Error::ConstructionFailure {
            attempts: MAX_ATTEMPTS,
        })
    }

    fn try_build<K: MphfKey>(keys: &[K], gamma: f64, seed: u64) -> Result<Option<Self>> {
        let mut remaining: Vec<K> = keys.to_vec();
        let mut all_bits = BitBuilder::new();
        let mut offsets = vec![0u64];
        for level in 0..MAX_LEVELS {
            if remaining.is_empty() {
                break;
            }
            let ls = level_seed(seed, level);
            let size = ((gamma * remaining.len() as f64).ceil() as u64)
                .max(64)
                .next_multiple_of(64);
            let mut seen = vec![0u64; (size / 64) as usize];
            let mut collided = vec![0u64; (size / 64) as usize];
            for k in &remaining {
                let p = reduce(k.hash64(ls), size) as usize;
                let (w, b) = (p / 64, 1u64 << (p % 64));
                if seen[w] & b != 0 {
                    collided[w] |= b;
                } else {
                    seen[w] |= b;
                }
            }
            remaining.retain(|k| {
                let p = reduce(k.hash64(ls), size) as usize;
                collided[p / 64] & (1 << (p % 64)) != 0
            });
            for (s, c) in seen.iter().zip(&collided) {
                all_bits.push_word(s & !c);
            }
            offsets.push(offsets.last().unwrap() + size);
        }
        let bits = RankBitvector::new(all_bits);
        let placed = bits.count_ones() as u64;

        let rs = residual_seed(seed);
        let mut residual: Vec<(u64, K)> = remaining.iter().map(|k| (k.hash64(rs), *k)).collect();
        residual.sort_unstable();
        for pair in residual.windows(2) {
            if pair[0].0 == pair[1].0 {
                if pair[0].1 == pair[1].1 {
                    return Err(Error::DuplicateKey);
                }
                return Ok(None);
            }
        }
        debug_assert_eq!(placed + residual.len() as u64, keys.len() as u64);
        Ok(Some(GeneralMphf {
            num_keys: keys.len() as u64,
            seed,
            gamma,
            offsets,
            bits,
            placed,
            residual: residual.into_iter().map(|(fp, _)| fp).collect(),
        }))
    }

    /// Index of `key` in `[0, num_keys)`. Non-members get an arbitrary
    /// in-range value; an empty function returns 0.
    #[inline]
    pub fn evaluate<K: MphfKey>(&self, key: &K) -> u64 {
        for level in 0..self.offsets.len() - 1 {
            let start = self.offsets[level];
            let size = self.offsets[level + 1] - start;
            let p = (start + reduce(key.hash64(level_seed(self.seed, level)), size)) as usize;
            if self.bits.get(p) {
                return self.bits.rank1(p) as u64;
            }
        }
        let fp = key.hash64(residual_seed(self.seed));
        match self.residual.binary_search(&fp) {
            Ok(i) => self.placed + i as u64,
            Err(_) => reduce(fp, self.num_keys),
        }
    }

    pub fn try_evaluate<K: MphfKey>(&self, key: &K) -> Result<u64> {
        if self.num_keys == 0 {
            return Err(Error::EmptyFunction);
        }
        Ok(self.evaluate(key))
    }

    pub fn num_keys(&self) -> u64 {
        self.num_keys
    }

    pub fn is_empty(&self) -> bool {
        self.num_keys == 0
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn num_levels(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn num_residual(&self) -> usize {
        self.residual.len()
    }

    /// Serialized bits per key (the constant `b`); 0 for an empty function.
    pub fn bits_per_key(&self) -> f64 {
        if self.num_keys == 0 {
            0.0
        } else {
            (8 * self.serialized_bytes()) as f64 / self.num_keys as f64
        }
    }
}

impl Persist for GeneralMphf {
    fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        write_u64(out, self.num_keys)?;
        write_u64(out, self.seed)?;
        write_u64(out, self.gamma.to_bits())?;
        write_words(out, &self.offsets)?;
        self.bits.write_to(out)?;
        write_words(out, &self.residual)
    }

    fn read_from<R: Read>(input: &mut R) -> Result<Self> {
        let num_keys = read_u64(input)?;
        let seed = read_u64(input)?;
        let gamma = f64::from_bits(read_u64(input)?);
        let offsets = read_words(input)?;
        let bits = RankBitvector::read_from(input)?;
        let residual = read_words(input)?;
        expect(!offsets.is_empty() && offsets[0] == 0, "MPHF level offsets")?;
        expect(offsets.windows(2).all(|w| w[0] <= w[1]), "MPHF level order")?;
        expect(
            *offsets.last().unwrap() as usize == bits.len(),
            "MPHF level bit total",
        )?;
        let placed = bits.count_ones() as u64;
        expect(placed + residual.len() as u64 == num_keys, "MPHF key count")?;
        Ok(GeneralMphf {
            num_keys,
            seed,
            gamma,
            offsets,
            bits,
            placed,
            residual,
        })
    }
}
