use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::persist::{expect, read_usize, write_u64, Persist};
use crate::succinct::bitvec::{BitBuilder, RankBitvector};

/// Sequence over a 4-symbol alphabet stored as a two-level wavelet tree.
///
/// The top level keeps the high bit of every symbol. The bottom level keeps
/// the low bits, first for symbols whose high bit is 0, then for the others.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeSequence {
    top: RankBitvector,
    bottom: RankBitvector,
    // number of symbols with high bit 0, i.e. where the right node starts
    split: usize,
    ones_before_split: usize,
}

impl TypeSequence {
    pub fn new(symbols: &[u8]) -> Self {
        let mut top = BitBuilder::new();
        let mut left = BitBuilder::new();
        let mut right = BitBuilder::new();
        for &s in symbols {
            debug_assert!(s < 4);
            let high = s & 2 != 0;
            top.push(high);
            if high {
                right.push(s & 1 != 0);
            } else {
                left.push(s & 1 != 0);
            }
        }
        let split = left.len();
        left.extend_from(&right);
        let bottom = RankBitvector::new(left);
        let ones_before_split = bottom.rank1(split);
        TypeSequence {
            top: RankBitvector::new(top),
            bottom,
            split,
            ones_before_split,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.top.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.top.is_empty()
    }

    #[inline]
    pub fn access(&self, i: usize) -> u8 {
        let ones = self.top.rank1(i);
        if self.top.get(i) {
            2 | self.bottom.get(self.split + ones) as u8
        } else {
            self.bottom.get(i - ones) as u8
        }
    }

    /// Occurrences of `symbol` in positions `[0, i)`.
    #[inline]
    pub fn rank(&self, symbol: u8, i: usize) -> usize {
        debug_assert!(i <= self.len());
        let ones = self.top.rank1(i);
        let (node_len, low_ones) = if symbol & 2 != 0 {
            let c = self.bottom.rank1(self.split + ones) - self.ones_before_split;
            (ones, c)
        } else {
            let zeros = i - ones;
            (zeros, self.bottom.rank1(zeros))
        };
        if symbol & 1 != 0 {
            low_ones
        } else {
            node_len - low_ones
        }
    }

    /// Symbol at `i` together with its rank among equal symbols in `[0, i)`.
    #[inline]
    pub fn access_rank(&self, i: usize) -> (u8, usize) {
        let ones = self.top.rank1(i);
        if self.top.get(i) {
            let pos = self.split + ones;
            let c = self.bottom.rank1(pos) - self.ones_before_split;
            if self.bottom.get(pos) {
                (3, c)
            } else {
                (2, ones - c)
            }
        } else {
            let pos = i - ones;
            let c = self.bottom.rank1(pos);
            if self.bottom.get(pos) {
                (1, c)
            } else {
                (0, pos - c)
            }
        }
    }

    pub fn try_rank(&self, symbol: u8, i: usize) -> Result<usize> {
        if i > self.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.len(),
            });
        }
        Ok(self.rank(symbol & 3, i))
    }

    pub fn size_in_bits(&self) -> usize {
        self.top.size_in_bits() + self.bottom.size_in_bits()
    }
}

impl Persist for TypeSequence {
    fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        write_u64(out, self.split as u64)?;
        self.top.write_to(out)?;
        self.bottom.write_to(out)
    }

    fn read_from<R: Read>(input: &mut R) -> Result<Self> {
        let split = read_usize(input)?;
        let top = RankBitvector::read_from(input)?;
        let bottom = RankBitvector::read_from(input)?;
        expect(top.len() == bottom.len(), "wavelet level lengths")?;
        expect(split == top.len() - top.count_ones(), "wavelet split")?;
        let ones_before_split = bottom.rank1(split);
        Ok(TypeSequence {
            top,
            bottom,
            split,
            ones_before_split,
        })
    }
}
