//! Un-partitioned layout.
//!
//! Minimizer slot `i = f_m(μ)` stores the prefix sum `L[i]` of super-k-mer
//! sizes and the position `P[i]` of the minimizer in the super-k-mer's first
//! k-mer. Ambiguous slots have size 0 in `L` and 0 in `P`.

use std::io::{Read, Write};

use crate::assembly::{assemble, Assembly, BuildOptions, Slot};
use crate::container::{check_header_counts, header_of, Header, Variant};
use crate::error::Result;
use crate::lookup::{Bucket, LpHash};
use crate::minimizer::MinimizerScheme;
use crate::mphf::GeneralMphf;
use crate::persist::{expect, Persist};
use crate::spss::SpssInput;
use crate::succinct::{bits_for, CompactVector, EliasFanoSeq};

#[derive(Clone, Debug)]
pub struct LpMphfBasic {
    scheme: MinimizerScheme,
    num_kmers: u64,
    num_unambiguous: u64,
    minimizer_mphf: GeneralMphf,
    sizes: EliasFanoSeq,
    first_pos: CompactVector,
    fallback: GeneralMphf,
}

impl LpMphfBasic {
    pub fn build(
        spss: &SpssInput,
        scheme: &MinimizerScheme,
        options: &BuildOptions,
    ) -> Result<Self> {
        let asm = assemble(spss, scheme, options)?;
        Self::from_assembly(scheme, asm)
    }

    pub(crate) fn from_assembly(scheme: &MinimizerScheme, asm: Assembly) -> Result<Self> {
        let sizes = EliasFanoSeq::from_prefix_sums(asm.slots.iter().map(|s| match *s {
            Slot::Unambiguous { size, .. } => size as u64,
            Slot::Ambiguous => 0,
        }))?;
        let mut first_pos = CompactVector::new(bits_for(scheme.w() as u64));
        for s in &asm.slots {
            first_pos.push(match *s {
                Slot::Unambiguous { p1, .. } => p1 as u64,
                Slot::Ambiguous => 0,
            });
        }
        Ok(LpMphfBasic {
            scheme: *scheme,
            num_kmers: asm.num_kmers,
            num_unambiguous: asm.num_unambiguous,
            minimizer_mphf: asm.minimizer_mphf,
            sizes,
            first_pos,
            fallback: asm.fallback,
        })
    }

    /// Slot index `f_m(μ)` of a minimizer.
    pub fn minimizer_index(&self, minimizer: u64) -> u64 {
        self.minimizer_mphf.evaluate(&minimizer)
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        header_of(self, Variant::Basic).write_to(out)?;
        self.minimizer_mphf.write_to(out)?;
        self.sizes.write_to(out)?;
        self.first_pos.write_to(out)?;
        self.fallback.write_to(out)
    }

    pub fn read_from<R: Read>(input: &mut R) -> Result<Self> {
        let header = Header::read_from(input)?;
        expect(header.variant == Variant::Basic, "variant is not basic")?;
        Self::read_body(header, input)
    }

    pub(crate) fn read_body<R: Read>(header: Header, input: &mut R) -> Result<Self> {
        let scheme = header.scheme()?;
        let minimizer_mphf = GeneralMphf::read_from(input)?;
        let sizes = EliasFanoSeq::read_from(input)?;
        let first_pos = CompactVector::read_from(input)?;
        let fallback = GeneralMphf::read_from(input)?;
        let m = minimizer_mphf.num_keys() as usize;
        expect(sizes.len() == m + 1, "L length")?;
        expect(first_pos.len() == m, "P length")?;
        expect(sizes.universe() == header.num_unambiguous, "L total")?;
        expect(
            header.num_unambiguous <= header.num_kmers,
            "unambiguous count",
        )?;
        let f = LpMphfBasic {
            scheme,
            num_kmers: header.num_kmers,
            num_unambiguous: header.num_unambiguous,
            minimizer_mphf,
            sizes,
            first_pos,
            fallback,
        };
        check_header_counts(&header, &f)?;
        Ok(f)
    }
}

impl LpHash for LpMphfBasic {
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
        let i = self.minimizer_mphf.evaluate(&minimizer) as usize;
        let (lo, hi) = self.sizes.access_pair(i);
        Bucket {
            base: lo,
            p1: self.first_pos.get(i) as u32,
            size: (hi - lo) as u32,
        }
    }

    fn fallback(&self) -> &GeneralMphf {
        &self.fallback
    }

    fn minimizer_mphf_bits_per_key(&self) -> f64 {
        self.minimizer_mphf.bits_per_key()
    }

    fn serialized_bytes(&self) -> usize {
        let mut counter = crate::persist::ByteCounter::default();
        self.write_to(&mut counter)
            .expect("counting sink never fails");
        counter.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kmer::{HashSeed, Kmer};
    use crate::minimizer::MinimizerCensus;
    use crate::spss::{generate_spss, GenConfig};
    use crate::stats::measure_epsilon;
    use std::collections::HashMap;

    fn build(spss: &SpssInput, m: usize, seed: u64) -> LpMphfBasic {
        let scheme = MinimizerScheme::new(spss.k(), m, HashSeed(seed)).unwrap();
        LpMphfBasic::build(spss, &scheme, &BuildOptions::default()).unwrap()
    }

    fn random_spss(length: usize, k: usize, seed: u64) -> SpssInput {
        generate_spss(GenConfig {
            length,
            k,
            seed,
            records: 1,
        })
        .unwrap()
    }

    #[test]
    fn singleton() {
        let s = b"ACGTTGCAAGT".to_vec();
        let spss = SpssInput::new(vec![s.clone()], 11, true).unwrap();
        let f = build(&spss, 5, 1);
        assert_eq!(f.num_kmers(), 1);
        assert_eq!(f.lookup(&Kmer::encode(&s).unwrap()), 0);
    }

    #[test]
    fn one_super_kmer_is_consecutive() {
        // search for a 16-base string (4 k-mers at k=13) with one shared minimizer
        let scheme = MinimizerScheme::new(13, 7, HashSeed(3)).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(4);
        let s = loop {
            let s: Vec<u8> = (0..16)
                .map(|_| b"ACGT"[rand::Rng::gen_range(&mut rng, 0..4)])
                .collect();
            let recs = scheme.split_superkmers(&s, 0).unwrap();
            let distinct = SpssInput::new(vec![s.clone()], 13, true).is_ok();
            if recs.len() == 1 && distinct {
                break s;
            }
        };
        let spss = SpssInput::new(vec![s], 13, true).unwrap();
        let f = build(&spss, 7, 3);
        let vals: Vec<u64> = spss.kmers().map(|x| f.lookup(&x)).collect();
        assert_eq!(vals, vec![0, 1, 2, 3]);
    }

    #[test]
    fn permutation_on_one_megabase() {
        let spss = random_spss(1_000_000, 31, 5);
        let f = build(&spss, 15, 5);
        let mut seen = vec![false; spss.num_kmers() as usize];
        for x in spss.kmers() {
            let v = f.lookup(&x) as usize;
            assert!(!seen[v], "value {v} produced twice");
            seen[v] = true;
        }
        assert!(seen.iter().all(|&b| b));
    }

    #[test]
    fn matches_offline_assignment() {
        let spss = random_spss(200_000, 31, 6);
        let scheme = MinimizerScheme::new(31, 15, HashSeed(6)).unwrap();
        let f = LpMphfBasic::build(&spss, &scheme, &BuildOptions::default()).unwrap();
        let records = scheme.split_all(&spss).unwrap();
        let census = MinimizerCensus::from_records(&records);

        // slot sizes in f_m order, then a prefix sum, then ranks within each super-k-mer
        let mut slot_size = vec![0u64; f.num_minimizers() as usize];
        for r in &records {
            if !census.is_ambiguous(r.minimizer) {
                slot_size[f.minimizer_index(r.minimizer) as usize] = r.size as u64;
            }
        }
        let mut start = vec![0u64; slot_size.len()];
        for i in 1..slot_size.len() {
            start[i] = start[i - 1] + slot_size[i - 1];
        }
        let mut table = HashMap::new();
        for r in &records {
            if census.is_ambiguous(r.minimizer) {
                continue;
            }
            let s = &spss.strings()[r.string_id as usize];
            let base = start[f.minimizer_index(r.minimizer) as usize];
            for t in 0..r.size as usize {
                let x = Kmer::encode(&s[r.start + t..r.start + t + 31]).unwrap();
                table.insert(x, base + t as u64);
            }
        }
        let mut checked = 0;
        for x in spss.kmers().take(100_000) {
            let v = f.lookup(&x);
            match table.get(&x) {
                Some(&want) => {
                    assert_eq!(v, want);
                    checked += 1;
                }
                None => assert!(v >= f.num_unambiguous()),
            }
        }
        assert!(checked > 90_000);
    }

    #[test]
    fn checked_lookup_detects_misses() {
        let spss = random_spss(50_000, 31, 7);
        let f = build(&spss, 15, 7);
        for x in spss.kmers() {
            assert_eq!(f.lookup_checked(&x).unwrap(), f.lookup(&x));
        }
        let other = random_spss(50_000, 31, 8);
        let mut misses = 0;
        for x in other.kmers() {
            match f.lookup_checked(&x) {
                Err(crate::Error::DefiniteMiss) => misses += 1,
                Ok(v) => assert!(v < f.num_kmers()),
                Err(e) => panic!("{e}"),
            }
            assert!(f.lookup(&x) < f.num_kmers());
        }
        assert!(misses > 0);
        let short = Kmer::encode(b"ACGT").unwrap();
        assert!(matches!(
            f.lookup_checked(&short),
            Err(crate::Error::KMismatch {
                expected: 31,
                got: 4
            })
        ));
    }

    #[test]
    fn storage_invariants() {
        let spss = random_spss(100_000, 31, 9);
        let f = build(&spss, 15, 9);
        let w = f.scheme().w() as u64;
        assert_eq!(f.sizes.access(0), 0);
        assert_eq!(f.sizes.access(f.sizes.len() - 1), f.num_unambiguous());
        for i in 0..f.first_pos.len() {
            let (lo, hi) = f.sizes.access_pair(i);
            let p1 = f.first_pos.get(i);
            if hi == lo {
                assert_eq!(p1, 0);
            } else {
                assert!(1 <= hi - lo && hi - lo <= p1 && p1 <= w);
            }
        }
    }

    #[test]
    fn epsilon_bounds() {
        let spss = random_spss(300_000, 31, 10);
        let f = build(&spss, 15, 10);
        let census = MinimizerCensus::compute(&spss, f.scheme()).unwrap();
        let eps = measure_epsilon(&f, &spss);
        let n = spss.num_kmers() as f64;
        let alpha = spss.fragmentation();
        let d = 2.0 / 18.0;
        assert!(eps >= alpha + 1.0 / n);
        assert!(
            (eps - (d + census.xi())).abs() / (d + census.xi()) < 0.2,
            "eps {eps}"
        );
    }

    #[test]
    fn epsilon_is_one_for_kmer_length_strings() {
        let spss = generate_spss(GenConfig {
            length: 20_000,
            k: 15,
            seed: 11,
            records: 1,
        })
        .unwrap();
        let pieces: Vec<Vec<u8>> = spss.kmers().step_by(20).map(|x| x.decode()).collect();
        let pieces = SpssInput::new(pieces, 15, true).unwrap();
        let f = build(&pieces, 7, 11);
        assert_eq!(measure_epsilon(&f, &pieces), 1.0);
    }

    #[test]
    fn persist_round_trip() {
        let spss = random_spss(30_000, 31, 12);
        let f = build(&spss, 15, 12);
        let mut buf = Vec::new();
        f.write_to(&mut buf).unwrap();
        assert_eq!(buf.len(), LpHash::serialized_bytes(&f));
        let back = LpMphfBasic::read_from(&mut buf.as_slice()).unwrap();
        for x in spss.kmers() {
            assert_eq!(back.lookup(&x), f.lookup(&x));
        }
    }
}
