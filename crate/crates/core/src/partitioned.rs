//! Partitioned layout.
//!
//! Super-k-mers are split into four types by where the minimizer sits in
//! their first and last k-mer. Left-right-max super-k-mers need no stored
//! data, left-max and right-max need only their size, and non-max need size
//! and first position. The codomain is laid out as
//!
//! ```text
//! [ left-right-max | left-max | right-max | non-max | fallback ]
//! ```
//!
//! Each type block is ordered by rank among same-type slots in `f_m` order.
//! Block offsets are k-mer counts. Ambiguous slots are stored as right-max
//! with size 0.

use std::io::{Read, Write};

use crate::assembly::{assemble, Assembly, BuildOptions, Slot};
use crate::container::{check_header_counts, header_of, Header, Variant};
use crate::error::Result;
use crate::lookup::{Bucket, LpHash};
use crate::minimizer::{MinimizerScheme, SuperKmerRecord};
use crate::mphf::GeneralMphf;
use crate::persist::{expect, read_u64, write_u64, ByteCounter, Persist};
use crate::spss::SpssInput;
use crate::succinct::{bits_for, CompactVector, EliasFanoSeq, TypeSequence};

/// Super-k-mer type under the first/last rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum FlType {
    LeftRightMax = 0,
    LeftMax = 1,
    RightMax = 2,
    NonMax = 3,
}

impl FlType {
    pub const ALL: [FlType; 4] = [
        FlType::LeftRightMax,
        FlType::LeftMax,
        FlType::RightMax,
        FlType::NonMax,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(c: u8) -> FlType {
        FlType::ALL[(c & 3) as usize]
    }

    pub fn name(self) -> &'static str {
        match self {
            FlType::LeftRightMax => "left-right-max",
            FlType::LeftMax => "left-max",
            FlType::RightMax => "right-max",
            FlType::NonMax => "non-max",
        }
    }
}

/// Type of a super-k-mer with `size` k-mers whose first k-mer has its
/// minimizer at 1-based position `p1`.
#[inline]
pub fn classify(size: u32, p1: u32, w: u32) -> FlType {
    debug_assert!(1 <= size && size <= p1 && p1 <= w);
    let p_last = p1 + 1 - size;
    match (p1 == w, p_last == 1) {
        (true, true) => FlType::LeftRightMax,
        (false, true) => FlType::LeftMax,
        (true, false) => FlType::RightMax,
        (false, false) => FlType::NonMax,
    }
}

pub fn classify_record(r: &SuperKmerRecord, w: u32) -> FlType {
    classify(r.size, r.p1, w)
}

#[derive(Clone, Debug)]
pub struct LpMphfPartitioned {
    scheme: MinimizerScheme,
    num_kmers: u64,
    num_unambiguous: u64,
    minimizer_mphf: GeneralMphf,
    types: TypeSequence,
    left_sizes: EliasFanoSeq,
    right_sizes: EliasFanoSeq,
    non_sizes: EliasFanoSeq,
    non_first_pos: CompactVector,
    fallback: GeneralMphf,
    // super-k-mer counts per type; right-max excludes ambiguous slots
    counts: [u64; 4],
    num_ambiguous_slots: u64,
    // k-mer offsets of the left-max, right-max and non-max blocks
    block_start: [u64; 3],
}

impl LpMphfPartitioned {
    pub fn build(
        spss: &SpssInput,
        scheme: &MinimizerScheme,
        options: &BuildOptions,
    ) -> Result<Self> {
        let asm = assemble(spss, scheme, options)?;
        Self::from_assembly(scheme, asm)
    }

    pub(crate) fn from_assembly(scheme: &MinimizerScheme, asm: Assembly) -> Result<Self> {
        let w = scheme.w() as u32;
        let mut symbols = Vec::with_capacity(asm.slots.len());
        let (mut left, mut right, mut non) = (Vec::new(), Vec::new(), Vec::new());
        let mut non_first_pos = CompactVector::new(bits_for(w.saturating_sub(1) as u64));
        for s in &asm.slots {
            let t = match *s {
                Slot::Ambiguous => {
                    right.push(0);
                    FlType::RightMax
                }
                Slot::Unambiguous { size, p1 } => {
                    let t = classify(size, p1, w);
                    match t {
                        FlType::LeftRightMax => {}
                        FlType::LeftMax => left.push(size as u64),
                        FlType::RightMax => right.push(size as u64),
                        FlType::NonMax => {
                            non.push(size as u64);
                            non_first_pos.push(p1 as u64);
                        }
                    }
                    t
                }
            };
            symbols.push(t.code());
        }
        let types = TypeSequence::new(&symbols);
        let f = Self::assemble_parts(
            *scheme,
            asm.num_kmers,
            asm.minimizer_mphf,
            types,
            EliasFanoSeq::from_prefix_sums(left)?,
            EliasFanoSeq::from_prefix_sums(right)?,
            EliasFanoSeq::from_prefix_sums(non)?,
            non_first_pos,
            asm.fallback,
        );
        debug_assert_eq!(f.num_unambiguous, asm.num_unambiguous);
        Ok(f)
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble_parts(
        scheme: MinimizerScheme,
        num_kmers: u64,
        minimizer_mphf: GeneralMphf,
        types: TypeSequence,
        left_sizes: EliasFanoSeq,
        right_sizes: EliasFanoSeq,
        non_sizes: EliasFanoSeq,
        non_first_pos: CompactVector,
        fallback: GeneralMphf,
    ) -> Self {
        let w = scheme.w() as u64;
        let n_lr = types.rank(FlType::LeftRightMax.code(), types.len()) as u64;
        let num_ambiguous_slots = right_sizes
            .iter()
            .zip(right_sizes.iter().skip(1))
            .filter(|(a, b)| a == b)
            .count() as u64;
        let counts = [
            n_lr,
            left_sizes.len() as u64 - 1,
            right_sizes.len() as u64 - 1 - num_ambiguous_slots,
            non_sizes.len() as u64 - 1,
        ];
        let k_lr = n_lr * w;
        let k_l = left_sizes.universe();
        let k_r = right_sizes.universe();
        let block_start = [k_lr, k_lr + k_l, k_lr + k_l + k_r];
        LpMphfPartitioned {
            scheme,
            num_kmers,
            num_unambiguous: block_start[2] + non_sizes.universe(),
            minimizer_mphf,
            types,
            left_sizes,
            right_sizes,
            non_sizes,
            non_first_pos,
            fallback,
            counts,
            num_ambiguous_slots,
            block_start,
        }
    }

    /// Unambiguous super-k-mers of each type, in [`FlType::ALL`] order.
    pub fn type_counts(&self) -> [u64; 4] {
        self.counts
    }

    pub fn num_ambiguous_minimizers(&self) -> u64 {
        self.num_ambiguous_slots
    }

    pub fn minimizer_index(&self, minimizer: u64) -> u64 {
        self.minimizer_mphf.evaluate(&minimizer)
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        header_of(self, Variant::Partitioned).write_to(out)?;
        for c in self.counts {
            write_u64(out, c)?;
        }
        self.minimizer_mphf.write_to(out)?;
        self.types.write_to(out)?;
        self.left_sizes.write_to(out)?;
        self.right_sizes.write_to(out)?;
        self.non_sizes.write_to(out)?;
        self.non_first_pos.write_to(out)?;
        self.fallback.write_to(out)
    }

    pub fn read_from<R: Read>(input: &mut R) -> Result<Self> {
        let header = Header::read_from(input)?;
        expect(
            header.variant == Variant::Partitioned,
            "variant is not partitioned",
        )?;
        Self::read_body(header, input)
    }

    pub(crate) fn read_body<R: Read>(header: Header, input: &mut R) -> Result<Self> {
        let scheme = header.scheme()?;
        let mut counts = [0u64; 4];
        for c in &mut counts {
            *c = read_u64(input)?;
        }
        let minimizer_mphf = GeneralMphf::read_from(input)?;
        let types = TypeSequence::read_from(input)?;
        let left_sizes = EliasFanoSeq::read_from(input)?;
        let right_sizes = EliasFanoSeq::read_from(input)?;
        let non_sizes = EliasFanoSeq::read_from(input)?;
        let non_first_pos = CompactVector::read_from(input)?;
        let fallback = GeneralMphf::read_from(input)?;

        expect(types.len() as u64 == minimizer_mphf.num_keys(), "R length")?;
        let per_type: Vec<usize> = (0..4).map(|t| types.rank(t, types.len())).collect();
        expect(per_type[0] as u64 == counts[0], "left-right-max count")?;
        expect(left_sizes.len() == per_type[1] + 1, "L_l length")?;
        expect(right_sizes.len() == per_type[2] + 1, "L_r length")?;
        expect(non_sizes.len() == per_type[3] + 1, "L_n length")?;
        expect(non_first_pos.len() == per_type[3], "P_n length")?;

        let f = Self::assemble_parts(
            scheme,
            header.num_kmers,
            minimizer_mphf,
            types,
            left_sizes,
            right_sizes,
            non_sizes,
            non_first_pos,
            fallback,
        );
        expect(f.counts == counts, "type counts")?;
        expect(
            f.num_unambiguous == header.num_unambiguous,
            "unambiguous count",
        )?;
        expect(
            header.num_unambiguous <= header.num_kmers,
            "unambiguous count",
        )?;
        check_header_counts(&header, &f)?;
        Ok(f)
    }
}

impl LpHash for LpMphfPartitioned {
    fn scheme(&self) -> &MinimizerScheme {
        &self.scheme
    }

    fn num_kmers(&self) -> u64 {
        self.num_kmers
    }

    fn num_unambiguous(&self) -> u64 {
        self.num_unambiguous
    }

    fn num_minimizers(&self) -> u64 {
        self.minimizer_mphf.num_keys()
    }

    #[inline]
    fn bucket(&self, minimizer: u64) -> Bucket {
        if self.minimizer_mphf.is_empty() {
            return Bucket {
                base: 0,
                p1: 0,
                size: 0,
            };
        }
        let w = self.scheme.w() as u32;
        let i = self.minimizer_mphf.evaluate(&minimizer) as usize;
        let (t, j) = self.types.access_rank(i);
        match FlType::from_code(t) {
            FlType::LeftRightMax => Bucket {
                base: j as u64 * w as u64,
                p1: w,
                size: w,
            },
            FlType::LeftMax => {
                let (lo, hi) = self.left_sizes.access_pair(j);
                let size = (hi - lo) as u32;
                Bucket {
                    base: self.block_start[0] + lo,
                    p1: size,
                    size,
                }
            }
            FlType::RightMax => {
                let (lo, hi) = self.right_sizes.access_pair(j);
                Bucket {
                    base: self.block_start[1] + lo,
                    p1: w,
                    size: (hi - lo) as u32,
                }
            }
            FlType::NonMax => {
                let (lo, hi) = self.non_sizes.access_pair(j);
                Bucket {
                    base: self.block_start[2] + lo,
                    p1: self.non_first_pos.get(j) as u32,
                    size: (hi - lo) as u32,
                }
            }
        }
    }

    fn fallback(&self) -> &GeneralMphf {
        &self.fallback
    }

    fn minimizer_mphf_bits_per_key(&self) -> f64 {
        self.minimizer_mphf.bits_per_key()
    }

    fn serialized_bytes(&self) -> usize {
        let mut counter = ByteCounter::default();
        self.write_to(&mut counter)
            .expect("counting sink never fails");
        counter.0
    }
}
