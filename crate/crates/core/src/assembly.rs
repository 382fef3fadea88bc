//! Construction steps shared by the two layouts: super-k-mer extraction,
//! census, the minimizer MPHF, and the fallback MPHF.

use crate::error::Result;
use crate::kmer::{mix64, Kmer};
use crate::minimizer::{MinimizerCensus, MinimizerScheme, SuperKmerRecord};
use crate::mphf::{GeneralMphf, DEFAULT_GAMMA};
use crate::spss::{KmerIter, SpssInput};

#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    /// Load factor of both inner MPHFs.
    pub gamma: f64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            gamma: DEFAULT_GAMMA,
        }
    }
}

/// Content of one minimizer slot, indexed by the minimizer MPHF.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Slot {
    Unambiguous { size: u32, p1: u32 },
    Ambiguous,
}

pub(crate) struct Assembly {
    pub minimizer_mphf: GeneralMphf,
    pub slots: Vec<Slot>,
    pub fallback: GeneralMphf,
    pub num_kmers: u64,
    pub num_unambiguous: u64,
}

pub(crate) fn minimizer_mphf_seed(scheme: &MinimizerScheme) -> u64 {
    mix64(scheme.seed().0 ^ 0x6d69_6e69_6d69_7a65)
}

pub(crate) fn fallback_seed(scheme: &MinimizerScheme) -> u64 {
    mix64(scheme.seed().0 ^ 0x6661_6c6c_6261_636b)
}

pub(crate) fn assemble(
    spss: &SpssInput,
    scheme: &MinimizerScheme,
    options: &BuildOptions,
) -> Result<Assembly> {
    let records = scheme.split_all(spss)?;
    assemble_from_records(spss, scheme, options, &records)
}

pub(crate) fn assemble_from_records(
    spss: &SpssInput,
    scheme: &MinimizerScheme,
    options: &BuildOptions,
    records: &[SuperKmerRecord],
) -> Result<Assembly> {
    let census = MinimizerCensus::from_records(records);
    let minimizers = census.minimizers();
    let minimizer_mphf =
        GeneralMphf::build(&minimizers, options.gamma, minimizer_mphf_seed(scheme))?;

    let mut slots = vec![Slot::Ambiguous; minimizers.len()];
    let mut fallback_keys: Vec<Kmer> = Vec::with_capacity(census.ambiguous_kmers() as usize);
    let mut num_unambiguous = 0u64;
    for r in records {
        let i = minimizer_mphf.evaluate(&r.minimizer) as usize;
        if census.is_ambiguous(r.minimizer) {
            let s = &spss.strings()[r.string_id as usize];
            let end = r.start + r.size as usize + scheme.k() - 1;
            fallback_keys.extend(KmerIter::new(&s[r.start..end], scheme.k()));
        } else {
            slots[i] = Slot::Unambiguous {
                size: r.size,
                p1: r.p1,
            };
            num_unambiguous += r.size as u64;
        }
    }
    let fallback = GeneralMphf::build(&fallback_keys, options.gamma, fallback_seed(scheme))?;
    Ok(Assembly {
        minimizer_mphf,
        slots,
        fallback,
        num_kmers: spss.num_kmers(),
        num_unambiguous,
    })
}
