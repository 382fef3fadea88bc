//! Random minimizers and super-k-mer decomposition.

use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kmer::{
    base_code_at, hash_with_key, kmer_mask, mmer_mask, HashSeed, Kmer, MAX_K, MAX_M,
};
use crate::spss::SpssInput;

/// The triple `(k, m, h)` with `h` realized as a seeded 64-bit mixer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MinimizerScheme {
    k: usize,
    m: usize,
    seed: HashSeed,
    seed_key: u64,
}

impl MinimizerScheme {
    pub fn new(k: usize, m: usize, seed: HashSeed) -> Result<Self> {
        if k == 0 || k > MAX_K {
            return Err(Error::InvalidParams(format!(
                "k={k} must be in 1..={MAX_K}"
            )));
        }
        if m == 0 || m > MAX_M || m > k {
            return Err(Error::InvalidParams(format!(
                "m={m} must be in 1..={} and at most k={k}",
                MAX_M
            )));
        }
        let scheme = MinimizerScheme {
            k,
            m,
            seed,
            seed_key: seed.key(),
        };
        if !scheme.density_condition_holds() {
            log::warn!(
                "m={m} does not satisfy m > 3*log4(w+1) for w={}; minimizer density may deviate from 2/(w+1)",
                scheme.w()
            );
        }
        Ok(scheme)
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of m-mers in a k-mer.
    #[inline]
    pub fn w(&self) -> usize {
        self.k - self.m + 1
    }

    #[inline]
    pub fn seed(&self) -> HashSeed {
        self.seed
    }

    #[inline]
    pub fn hash(&self, mmer: u64) -> u64 {
        hash_with_key(mmer, self.seed_key)
    }

    pub fn density_condition_holds(&self) -> bool {
        self.m as f64 > 3.0 * ((self.w() + 1) as f64).log(4.0)
    }

    /// Default minimizer length for k-mers over an input of `total_len`
    /// bases: at least `ceil(log4(total_len))`, and large enough for
    /// [`density_condition_holds`](Self::density_condition_holds).
    pub fn default_m(k: usize, total_len: u64) -> usize {
        let by_size = ((total_len.max(1) as f64).log(4.0).ceil() as usize).max(1);
        let by_density = (1..=k)
            .find(|&m| m as f64 > 3.0 * ((k - m + 2) as f64).log(4.0))
            .unwrap_or(k);
        by_size.max(by_density).min(k).min(MAX_M)
    }

    /// Starts from [`default_m`](Self::default_m) and lengthens the
    /// minimizer until at most `max_xi` of the k-mers of `spss` have an
    /// ambiguous minimizer, or no longer length is allowed.
    pub fn choose_m(spss: &SpssInput, seed: HashSeed, max_xi: f64) -> Result<usize> {
        let k = spss.k();
        let mut m = Self::default_m(k, spss.total_len());
        loop {
            let xi = MinimizerCensus::compute(spss, &Self::new(k, m, seed)?)?.xi();
            log::debug!("m={m}: xi={xi:.4}");
            if xi <= max_xi || m >= k.min(MAX_M) {
                return Ok(m);
            }
            m += 1;
        }
    }

    /// Leftmost m-mer of minimum hash inside `x`.
    #[inline]
    pub fn minimizer(&self, x: &Kmer) -> MinimizerHit {
        debug_assert_eq!(x.k(), self.k);
        let mut best_hash = u64::MAX;
        let mut best = MinimizerHit { mmer: 0, pos: 0 };
        for off in 0..self.w() {
            let mmer = x.mmer_at(off, self.m);
            let h = self.hash(mmer);
            if h < best_hash || best.pos == 0 {
                best_hash = h;
                best = MinimizerHit {
                    mmer,
                    pos: off as u32 + 1,
                };
            }
        }
        best
    }

    /// Sliding-window minimizers over every k-mer of `seq`.
    pub fn windows<'a>(&self, seq: &'a [u8]) -> MinimizerWindows<'a> {
        MinimizerWindows::new(*self, seq)
    }

    /// Splits one string into super-k-mers. Records are keyed on the
    /// minimizer *occurrence*, so a repeated m-mer value starts a new record.
    pub fn split_superkmers(&self, seq: &[u8], string_id: u32) -> Result<Vec<SuperKmerRecord>> {
        if seq.len() < self.k {
            return Err(Error::StringShorterThanK {
                record: string_id as usize,
                len: seq.len(),
                k: self.k,
            });
        }
        let mut out = Vec::with_capacity(2 * (seq.len() - self.k + 1) / (self.w() + 1) + 1);
        let mut cur: Option<(usize, SuperKmerRecord)> = None;
        for win in self.windows(seq) {
            let win = win?;
            match &mut cur {
                Some((occ, rec)) if *occ == win.occurrence => rec.size += 1,
                _ => {
                    if let Some((_, rec)) = cur.take() {
                        out.push(rec);
                    }
                    cur = Some((
                        win.occurrence,
                        SuperKmerRecord {
                            minimizer: win.mmer,
                            size: 1,
                            p1: (win.occurrence - win.kmer_start + 1) as u32,
                            string_id,
                            start: win.kmer_start,
                        },
                    ));
                }
            }
        }
        if let Some((_, rec)) = cur {
            out.push(rec);
        }
        Ok(out)
    }

    /// Super-k-mers of every string, in string order.
    pub fn split_all(&self, spss: &SpssInput) -> Result<Vec<SuperKmerRecord>> {
        let per_string: Vec<Result<Vec<SuperKmerRecord>>> = spss
            .strings()
            .par_iter()
            .enumerate()
            .map(|(i, s)| self.split_superkmers(s, i as u32))
            .collect();
        let mut out = Vec::new();
        for recs in per_string {
            out.extend(recs?);
        }
        Ok(out)
    }
}

/// Minimizer of one k-mer: the packed m-mer and its 1-based start position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MinimizerHit {
    pub mmer: u64,
    pub pos: u32,
}

/// One maximal run of k-mers sharing a minimizer occurrence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuperKmerRecord {
    pub minimizer: u64,
    /// Number of k-mers, in `1..=w`.
    pub size: u32,
    /// 1-based minimizer position inside the first k-mer, in `size..=w`.
    pub p1: u32,
    pub string_id: u32,
    /// 0-based offset of the first k-mer in its string.
    pub start: usize,
}

impl SuperKmerRecord {
    /// 1-based minimizer position inside the last k-mer.
    #[inline]
    pub fn p_last(&self) -> u32 {
        self.p1 + 1 - self.size
    }
}

/// The k-mer starting at `kmer_start` and its minimizer occurrence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub kmer_start: usize,
    /// Absolute 0-based offset of the minimizer in the string.
    pub occurrence: usize,
    pub mmer: u64,
    pub kmer: Kmer,
}

impl Window {
    /// 1-based minimizer position inside the k-mer.
    #[inline]
    pub fn pos(&self) -> u32 {
        (self.occurrence - self.kmer_start + 1) as u32
    }
}

/// Monotone-deque sliding minimum over m-mer hashes. Amortized O(1) per base.
pub struct MinimizerWindows<'a> {
    scheme: MinimizerScheme,
    seq: &'a [u8],
    i: usize,
    mmer: u64,
    kmer: u128,
    // (start offset, hash, packed m-mer), hashes non-decreasing front to back
    deque: VecDeque<(usize, u64, u64)>,
    failed: bool,
}

impl<'a> MinimizerWindows<'a> {
    fn new(scheme: MinimizerScheme, seq: &'a [u8]) -> Self {
        MinimizerWindows {
            scheme,
            seq,
            i: 0,
            mmer: 0,
            kmer: 0,
            deque: VecDeque::with_capacity(scheme.w() + 1),
            failed: false,
        }
    }
}

impl Iterator for MinimizerWindows<'_> {
    type Item = Result<Window>;

    #[inline]
    fn next(&mut self) -> Option<Result<Window>> {
        let (k, m) = (self.scheme.k, self.scheme.m);
        while self.i < self.seq.len() && !self.failed {
            let c = match base_code_at(self.seq, self.i) {
                Ok(c) => c,
                Err(e) => {
                    self.failed = true;
                    return Some(Err(e));
                }
            };
            let i = self.i;
            self.i += 1;
            self.mmer = ((self.mmer << 2) | c as u64) & mmer_mask(m);
            self.kmer = ((self.kmer << 2) | c as u128) & kmer_mask(k);
            if i + 1 < m {
                continue;
            }
            let start = i + 1 - m;
            let h = self.scheme.hash(self.mmer);
            // Strict comparison keeps equal hashes on the left, giving leftmost ties.
            while matches!(self.deque.back(), Some(&(_, bh, _)) if bh > h) {
                self.deque.pop_back();
            }
            self.deque.push_back((start, h, self.mmer));
            if i + 1 < k {
                continue;
            }
            let kmer_start = i + 1 - k;
            while self.deque.front().unwrap().0 < kmer_start {
                self.deque.pop_front();
            }
            let &(occ, _, mmer) = self.deque.front().unwrap();
            return Some(Ok(Window {
                kmer_start,
                occurrence: occ,
                mmer,
                kmer: Kmer::from_packed(self.kmer, k),
            }));
        }
        None
    }
}

/// Number of super-k-mers per minimizer value over a whole input.
#[derive(Clone, Debug, Default)]
pub struct MinimizerCensus {
    counts: HashMap<u64, u32>,
    ambiguous_kmers: u64,
    num_kmers: u64,
}

impl MinimizerCensus {
    pub fn from_records(records: &[SuperKmerRecord]) -> Self {
        let mut counts: HashMap<u64, u32> = HashMap::with_capacity(records.len());
        for r in records {
            *counts.entry(r.minimizer).or_default() += 1;
        }
        let mut ambiguous_kmers = 0;
        let mut num_kmers = 0;
        for r in records {
            num_kmers += r.size as u64;
            if counts[&r.minimizer] > 1 {
                ambiguous_kmers += r.size as u64;
            }
        }
        MinimizerCensus {
            counts,
            ambiguous_kmers,
            num_kmers,
        }
    }

    pub fn compute(spss: &SpssInput, scheme: &MinimizerScheme) -> Result<Self> {
        Ok(Self::from_records(&scheme.split_all(spss)?))
    }

    pub fn count(&self, minimizer: u64) -> u32 {
        self.counts.get(&minimizer).copied().unwrap_or(0)
    }

    pub fn is_ambiguous(&self, minimizer: u64) -> bool {
        self.count(minimizer) > 1
    }

    /// Number of distinct minimizer values, ambiguous included.
    pub fn num_distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn num_ambiguous(&self) -> usize {
        self.counts.values().filter(|&&c| c > 1).count()
    }

    pub fn num_unambiguous(&self) -> usize {
        self.num_distinct() - self.num_ambiguous()
    }

    pub fn ambiguous_kmers(&self) -> u64 {
        self.ambiguous_kmers
    }

    /// Fraction of k-mers whose minimizer is ambiguous.
    pub fn xi(&self) -> f64 {
        if self.num_kmers == 0 {
            0.0
        } else {
            self.ambiguous_kmers as f64 / self.num_kmers as f64
        }
    }

    /// Distinct minimizers in ascending order.
    pub fn minimizers(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.counts.keys().copied().collect();
        v.sort_unstable();
        v
    }
}
