use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::persist::{expect, read_u64, read_usize, read_words, write_u64, write_words, Persist};
use crate::succinct::int_vec::CompactVector;

/// One select sample every this many ones of the high-bits vector.
const SELECT_SAMPLE: usize = 1024;

/// Elias-Fano encoding of a non-decreasing sequence over `[0, universe]`.
///
/// Low parts are `⌊log₂(u/ℓ)⌋` bits each in a packed array; high parts are
/// unary-coded in a bit vector whose `i`-th one sits at `high(v_i) + i`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EliasFanoSeq {
    len: usize,
    universe: u64,
    low: CompactVector,
    high: Vec<u64>,
    high_len: usize,
    // bit position of every SELECT_SAMPLE-th one
    samples: Vec<u64>,
}

impl EliasFanoSeq {
    pub fn new(values: &[u64], universe: u64) -> Result<Self> {
        for i in 1..values.len() {
            if values[i] < values[i - 1] {
                return Err(Error::NotMonotone { index: i });
            }
        }
        if let Some(&last) = values.last() {
            if last > universe {
                return Err(Error::UniverseTooSmall {
                    universe,
                    value: last,
                });
            }
        }
        let len = values.len();
        let low_width = low_width(universe, len);
        let low_mask = if low_width == 0 {
            0
        } else {
            (1u64 << low_width) - 1
        };
        let high_len = len + (universe >> low_width) as usize + 1;
        let mut high = vec![0u64; high_len.div_ceil(64)];
        let mut low = CompactVector::new(low_width);
        let mut samples = Vec::with_capacity(len / SELECT_SAMPLE + 1);
        for (i, &v) in values.iter().enumerate() {
            low.push(v & low_mask);
            let pos = (v >> low_width) as usize + i;
            high[pos / 64] |= 1 << (pos % 64);
            if i % SELECT_SAMPLE == 0 {
                samples.push(pos as u64);
            }
        }
        Ok(EliasFanoSeq {
            len,
            universe,
            low,
            high,
            high_len,
            samples,
        })
    }

    /// Builds from the running sums of `sizes`, starting with 0.
    pub fn from_prefix_sums<I: IntoIterator<Item = u64>>(sizes: I) -> Result<Self> {
        let mut acc = 0u64;
        let mut values = vec![0u64];
        for s in sizes {
            acc += s;
            values.push(acc);
        }
        Self::new(&values, acc)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn universe(&self) -> u64 {
        self.universe
    }

    #[inline]
    fn low_width(&self) -> u32 {
        self.low.width()
    }

    #[inline]
    pub fn access(&self, i: usize) -> u64 {
        debug_assert!(i < self.len);
        let pos = self.select1(i);
        (((pos - i) as u64) << self.low_width()) | self.low.get(i)
    }

    /// `(access(i), access(i + 1))` with a single select.
    #[inline]
    pub fn access_pair(&self, i: usize) -> (u64, u64) {
        debug_assert!(i + 1 < self.len);
        let pos = self.select1(i);
        let next = self.next_one(pos + 1);
        let lw = self.low_width();
        (
            (((pos - i) as u64) << lw) | self.low.get(i),
            (((next - i - 1) as u64) << lw) | self.low.get(i + 1),
        )
    }

    pub fn try_access(&self, i: usize) -> Result<u64> {
        if i >= self.len {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.len,
            });
        }
        Ok(self.access(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len).map(move |i| self.access(i))
    }

    /// Position of the `r`-th (0-based) one in the high bits.
    #[inline]
    fn select1(&self, r: usize) -> usize {
        let sample = r / SELECT_SAMPLE;
        let start = self.samples[sample] as usize;
        let mut rem = r - sample * SELECT_SAMPLE;
        let mut wi = start / 64;
        let mut word = self.high[wi] & (u64::MAX << (start % 64));
        loop {
            let ones = word.count_ones() as usize;
            if ones > rem {
                return wi * 64 + select_in_word(word, rem);
            }
            rem -= ones;
            wi += 1;
            word = self.high[wi];
        }
    }

    /// Position of the first one at or after `from`.
    #[inline]
    fn next_one(&self, from: usize) -> usize {
        let mut wi = from / 64;
        let mut word = self.high[wi] & (u64::MAX << (from % 64));
        while word == 0 {
            wi += 1;
            word = self.high[wi];
        }
        wi * 64 + word.trailing_zeros() as usize
    }

    pub fn size_in_bits(&self) -> usize {
        self.low.size_in_bits() + 64 * (self.high.len() + self.samples.len())
    }
}

#[inline]
fn low_width(universe: u64, len: usize) -> u32 {
    if len == 0 || universe < len as u64 {
        0
    } else {
        (universe / len as u64).ilog2()
    }
}

#[inline]
fn select_in_word(mut word: u64, mut r: usize) -> usize {
    while r > 0 {
        word &= word - 1;
        r -= 1;
    }
    word.trailing_zeros() as usize
}

impl Persist for EliasFanoSeq {
    fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        write_u64(out, self.len as u64)?;
        write_u64(out, self.universe)?;
        write_u64(out, self.high_len as u64)?;
        self.low.write_to(out)?;
        write_words(out, &self.high)?;
        write_words(out, &self.samples)
    }

    fn read_from<R: Read>(input: &mut R) -> Result<Self> {
        let len = read_usize(input)?;
        let universe = read_u64(input)?;
        let high_len = read_usize(input)?;
        let low = CompactVector::read_from(input)?;
        let high = read_words(input)?;
        let samples = read_words(input)?;
        expect(low.len() == len, "Elias-Fano low length")?;
        expect(
            low.width() == low_width(universe, len),
            "Elias-Fano low width",
        )?;
        expect(
            high.len() == high_len.div_ceil(64),
            "Elias-Fano high length",
        )?;
        expect(
            samples.len() == len.div_ceil(SELECT_SAMPLE),
            "Elias-Fano select samples",
        )?;
        let ones: usize = high.iter().map(|w| w.count_ones() as usize).sum();
        expect(ones == len, "Elias-Fano high bit count")?;
        Ok(EliasFanoSeq {
            len,
            universe,
            low,
            high,
            high_len,
            samples,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_sequence() {
        let ef = EliasFanoSeq::new(&[], 0).unwrap();
        assert_eq!(ef.len(), 0);
        assert!(ef.iter().next().is_none());
        assert!(ef.try_access(0).is_err());
    }

    #[test]
    fn small_fixture() {
        let ef = EliasFanoSeq::new(&[0, 0, 0, 5], 5).unwrap();
        assert_eq!(ef.iter().collect::<Vec<_>>(), vec![0, 0, 0, 5]);
        assert_eq!(ef.access_pair(2), (0, 5));
    }

    #[test]
    fn errors() {
        assert!(matches!(
            EliasFanoSeq::new(&[1, 3, 2], 10),
            Err(Error::NotMonotone { index: 2 })
        ));
        assert!(matches!(
            EliasFanoSeq::new(&[1, 30], 10),
            Err(Error::UniverseTooSmall {
                universe: 10,
                value: 30
            })
        ));
    }

    #[test]
    fn random_sorted_matches_plain_array() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut values: Vec<u64> = (0..100_000).map(|_| rng.gen_range(0..10_000_000)).collect();
        values.sort_unstable();
        let ef = EliasFanoSeq::new(&values, 10_000_000).unwrap();
        for _ in 0..10_000 {
            let i = rng.gen_range(0..values.len());
            assert_eq!(ef.access(i), values[i]);
            if i + 1 < values.len() {
                assert_eq!(ef.access_pair(i), (values[i], values[i + 1]));
            }
        }
        // ℓ·(2 + ⌈log₂(u/ℓ)⌉) plus select samples
        let bound = values.len() as f64 * (2.0 + (10_000_000f64 / 100_000.0).log2().ceil());
        assert!((ef.size_in_bits() as f64) < bound * 1.05);
    }

    #[test]
    fn prefix_sums() {
        let ef = EliasFanoSeq::from_prefix_sums([3, 0, 2, 7]).unwrap();
        assert_eq!(ef.iter().collect::<Vec<_>>(), vec![0, 3, 3, 5, 12]);
        assert_eq!(ef.universe(), 12);
    }

    proptest! {
        #[test]
        fn access_reproduces_input(mut values in proptest::collection::vec(0u64..5_000, 0..3_000), extra in 0u64..100) {
            values.sort_unstable();
            let universe = values.last().copied().unwrap_or(0) + extra;
            let ef = EliasFanoSeq::new(&values, universe).unwrap();
            prop_assert_eq!(ef.iter().collect::<Vec<_>>(), values.clone());
            let mut buf = Vec::new();
            ef.write_to(&mut buf).unwrap();
            prop_assert_eq!(EliasFanoSeq::read_from(&mut buf.as_slice()).unwrap(), ef);
        }
    }

    #[test]
    fn lengths_up_to_1e5() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for len in [0usize, 1, 2, 63, 64, 65, 1023, 1024, 1025, 4097, 100_000] {
            let mut acc = 0u64;
            let values: Vec<u64> = (0..len)
                .map(|_| {
                    acc += rng.gen_range(0..20);
                    acc
                })
                .collect();
            let ef = EliasFanoSeq::new(&values, acc).unwrap();
            assert_eq!(ef.iter().collect::<Vec<_>>(), values);
        }
    }
}
