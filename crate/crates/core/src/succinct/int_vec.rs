use std::io::{Read, Write};

use crate::error::Result;
use crate::persist::{expect, read_usize, read_words, write_u64, write_words, Persist};

/// Number of bits needed to write `v` in binary (0 for 0).
#[inline]
pub fn bits_for(v: u64) -> u32 {
    64 - v.leading_zeros()
}

/// Fixed-width packed integer array.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CompactVector {
    width: u32,
    len: usize,
    words: Vec<u64>,
}

impl CompactVector {
    pub fn new(width: u32) -> Self {
        assert!(width <= 64);
        CompactVector {
            width,
            len: 0,
            words: Vec::new(),
        }
    }

    /// Packs `values` at the smallest width that holds their maximum.
    pub fn from_slice(values: &[u64]) -> Self {
        let width = values.iter().copied().max().map_or(0, bits_for);
        Self::from_slice_with_width(values, width)
    }

    pub fn from_slice_with_width(values: &[u64], width: u32) -> Self {
        let mut cv = Self::new(width);
        cv.words
            .reserve((values.len() * width as usize).div_ceil(64));
        for &v in values {
            cv.push(v);
        }
        cv
    }

    pub fn push(&mut self, v: u64) {
        let width = self.width as usize;
        if width == 0 {
            self.len += 1;
            return;
        }
        debug_assert!(
            width == 64 || v >> width == 0,
            "{v} does not fit in {width} bits"
        );
        let bit = self.len * width;
        let (w, o) = (bit / 64, bit % 64);
        let needed = (bit + width).div_ceil(64);
        if self.words.len() < needed {
            self.words.resize(needed, 0);
        }
        self.words[w] |= v << o;
        if o + width > 64 {
            self.words[w + 1] |= v >> (64 - o);
        }
        self.len += 1;
    }

    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        debug_assert!(i < self.len);
        let width = self.width as usize;
        if width == 0 {
            return 0;
        }
        let bit = i * width;
        let (w, o) = (bit / 64, bit % 64);
        let mut v = self.words[w] >> o;
        if o + width > 64 {
            v |= self.words[w + 1] << (64 - o);
        }
        if width == 64 {
            v
        } else {
            v & ((1u64 << width) - 1)
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn size_in_bits(&self) -> usize {
        64 * self.words.len()
    }
}

impl Persist for CompactVector {
    fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        write_u64(out, self.width as u64)?;
        write_u64(out, self.len as u64)?;
        write_words(out, &self.words)
    }

    fn read_from<R: Read>(input: &mut R) -> Result<Self> {
        let width = read_usize(input)?;
        expect(width <= 64, "integer width")?;
        let len = read_usize(input)?;
        let words = read_words(input)?;
        expect(
            words.len() == (len.saturating_mul(width)).div_ceil(64),
            "packed array word count",
        )?;
        Ok(CompactVector {
            width: width as u32,
            len,
            words,
        })
    }
}
