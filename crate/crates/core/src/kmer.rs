//! 2-bit DNA packing and seeded hashing of packed m-mers.
//!
//! Bases map to A=0, C=1, G=2, T=3. A k-mer is packed with its first base in
//! the most significant occupied position, so the packed integers of equal
//! length k-mers sort lexicographically.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported k-mer length (two 64-bit words).
pub const MAX_K: usize = 63;
/// Largest supported minimizer length (one 64-bit word).
pub const MAX_M: usize = 32;

const INVALID: u8 = 0xFF;

static ENCODE: [u8; 256] = {
    let mut table = [INVALID; 256];
    table[b'A' as usize] = 0;
    table[b'C' as usize] = 1;
    table[b'G' as usize] = 2;
    table[b'T' as usize] = 3;
    table
};

const DECODE: [u8; 4] = *b"ACGT";

/// 2-bit code of a base, `None` for anything outside `ACGT`.
#[inline]
pub fn base_code(base: u8) -> Option<u8> {
    match ENCODE[base as usize] {
        INVALID => None,
        c => Some(c),
    }
}

#[inline]
pub(crate) fn base_code_at(seq: &[u8], pos: usize) -> Result<u8> {
    base_code(seq[pos]).ok_or(Error::InvalidBase {
        base: seq[pos] as char,
        pos,
    })
}

#[inline]
pub fn code_to_base(code: u8) -> u8 {
    DECODE[(code & 3) as usize]
}

/// A fixed-length DNA string packed two bits per base.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Kmer {
    packed: u128,
    k: u8,
}

impl Kmer {
    pub fn encode(s: &[u8]) -> Result<Self> {
        if s.is_empty() || s.len() > MAX_K {
            return Err(Error::LengthOutOfRange {
                len: s.len(),
                min: 1,
                max: MAX_K,
            });
        }
        let mut packed = 0u128;
        for pos in 0..s.len() {
            packed = (packed << 2) | base_code_at(s, pos)? as u128;
        }
        Ok(Kmer {
            packed,
            k: s.len() as u8,
        })
    }

    /// Builds a k-mer from an already packed value. Bits above `2k` are dropped.
    pub fn from_packed(packed: u128, k: usize) -> Self {
        debug_assert!((1..=MAX_K).contains(&k));
        Kmer {
            packed: packed & kmer_mask(k),
            k: k as u8,
        }
    }

    #[inline]
    pub fn packed(&self) -> u128 {
        self.packed
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k as usize
    }

    pub fn decode(&self) -> Vec<u8> {
        let k = self.k();
        (0..k)
            .map(|i| code_to_base((self.packed >> (2 * (k - 1 - i))) as u8))
            .collect()
    }

    /// Packed m-mer starting at 0-based offset `offset` inside this k-mer.
    #[inline]
    pub fn mmer_at(&self, offset: usize, m: usize) -> u64 {
        let shift = 2 * (self.k() - m - offset);
        ((self.packed >> shift) as u64) & mmer_mask(m)
    }
}

impl fmt::Debug for Kmer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Kmer({})", self)
    }
}

impl fmt::Display for Kmer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&String::from_utf8_lossy(&self.decode()))
    }
}

#[inline]
pub fn kmer_mask(k: usize) -> u128 {
    if k >= 64 {
        u128::MAX
    } else {
        (1u128 << (2 * k)) - 1
    }
}

#[inline]
pub fn mmer_mask(m: usize) -> u64 {
    if m >= 32 {
        u64::MAX
    } else {
        (1u64 << (2 * m)) - 1
    }
}

/// 64-bit finalizer (MurmurHash3 `fmix64`). A bijection on `u64`.
#[inline]
pub fn mix64(mut x: u64) -> u64 {
    x ^= x >> 33;
    x = x.wrapping_mul(0xff51_afd7_ed55_8ccd);
    x ^= x >> 33;
    x = x.wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    x ^= x >> 33;
    x
}

/// Seed of the random hash function used to pick minimizers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct HashSeed(pub u64);

impl HashSeed {
    /// Whitened seed, XOR-ed into every input before mixing.
    #[inline]
    pub fn key(self) -> u64 {
        mix64(self.0 ^ 0x9e37_79b9_7f4a_7c15)
    }
}

/// Hash of a packed m-mer (m ≤ 32) under `seed`.
#[inline]
pub fn hash_mmer(mmer: u64, seed: HashSeed) -> u64 {
    hash_with_key(mmer, seed.key())
}

#[inline]
pub(crate) fn hash_with_key(x: u64, key: u64) -> u64 {
    mix64(x ^ key)
}
