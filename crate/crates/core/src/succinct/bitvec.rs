use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::persist::{expect, read_usize, read_words, write_u64, write_words, Persist};

const BLOCK_BITS: usize = 512;
const WORDS_PER_BLOCK: usize = BLOCK_BITS / 64;

/// Append-only bit buffer.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitBuilder {
    words: Vec<u64>,
    len: usize,
}

impl BitBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_len(len: usize) -> Self {
        BitBuilder {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        if bit {
            self.words[self.len / 64] |= 1 << (self.len % 64);
        }
        self.len += 1;
    }

    /// Appends 64 bits at once; the current length must be a multiple of 64.
    pub fn push_word(&mut self, word: u64) {
        assert_eq!(self.len % 64, 0);
        self.words.push(word);
        self.len += 64;
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn extend_from(&mut self, other: &BitBuilder) {
        for i in 0..other.len {
            self.push(other.get(i));
        }
    }

    pub fn into_words(self) -> (Vec<u64>, usize) {
        (self.words, self.len)
    }
}

/// Bit vector with a Rank9 directory: per 512-bit block one absolute count
/// and seven packed 9-bit in-block counts, 25% over the payload.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RankBitvector {
    len: usize,
    words: Vec<u64>,
    directory: Vec<u64>,
}

impl RankBitvector {
    pub fn new(bits: BitBuilder) -> Self {
        let (words, len) = bits.into_words();
        let directory = build_directory(&words, len);
        RankBitvector {
            len,
            words,
            directory,
        }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut b = BitBuilder::new();
        for bit in bits {
            b.push(bit);
        }
        Self::new(b)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    /// Number of set bits in `[0, i)`.
    #[inline]
    pub fn rank1(&self, i: usize) -> usize {
        debug_assert!(i <= self.len);
        let block = i / BLOCK_BITS;
        let word = i / 64;
        let sub = word % WORDS_PER_BLOCK;
        let mut r = self.directory[2 * block] as usize;
        if sub > 0 {
            r += ((self.directory[2 * block + 1] >> (9 * (sub - 1))) & 0x1FF) as usize;
        }
        let rem = i % 64;
        if rem > 0 {
            r += (self.words[word] & ((1u64 << rem) - 1)).count_ones() as usize;
        }
        r
    }

    #[inline]
    pub fn rank0(&self, i: usize) -> usize {
        i - self.rank1(i)
    }

    pub fn try_rank1(&self, i: usize) -> Result<usize> {
        if i > self.len {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.len,
            });
        }
        Ok(self.rank1(i))
    }

    pub fn count_ones(&self) -> usize {
        self.rank1(self.len)
    }

    /// Payload plus directory, in bits.
    pub fn size_in_bits(&self) -> usize {
        64 * (self.words.len() + self.directory.len())
    }
}

fn build_directory(words: &[u64], len: usize) -> Vec<u64> {
    let blocks = len / BLOCK_BITS + 1;
    let mut dir = Vec::with_capacity(2 * blocks);
    let mut total = 0u64;
    for b in 0..blocks {
        dir.push(total);
        let mut packed = 0u64;
        let mut in_block = 0u64;
        for s in 0..WORDS_PER_BLOCK {
            let w = words.get(b * WORDS_PER_BLOCK + s).copied().unwrap_or(0);
            if s > 0 {
                packed |= in_block << (9 * (s - 1));
            }
            in_block += w.count_ones() as u64;
        }
        dir.push(packed);
        total += in_block;
    }
    dir
}

impl Persist for RankBitvector {
    fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        write_u64(out, self.len as u64)?;
        write_words(out, &self.words)?;
        write_words(out, &self.directory)
    }

    fn read_from<R: Read>(input: &mut R) -> Result<Self> {
        let len = read_usize(input)?;
        let words = read_words(input)?;
        let directory = read_words(input)?;
        expect(words.len() == len.div_ceil(64), "bitvector word count")?;
        expect(
            directory.len() == 2 * (len / BLOCK_BITS + 1),
            "rank directory size",
        )?;
        Ok(RankBitvector {
            len,
            words,
            directory,
        })
    }
}
