//! Lookup machinery shared by both layouts: random lookup, checked lookup,
//! and streaming lookup over a query string.

use crate::error::{Error, Result};
use crate::kmer::Kmer;
use crate::minimizer::{MinimizerScheme, MinimizerWindows};
use crate::mphf::GeneralMphf;

/// What a layout knows about the super-k-mer owning a minimizer.
///
/// A member k-mer whose minimizer starts at position `p` maps to
/// `base + p1 - p`. `size == 0` marks an ambiguous minimizer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bucket {
    pub base: u64,
    pub p1: u32,
    pub size: u32,
}

impl Bucket {
    #[inline]
    pub fn is_ambiguous(&self) -> bool {
        self.size == 0
    }
}

/// A locality-preserving minimal perfect hash over the k-mers of an input.
pub trait LpHash {
    fn scheme(&self) -> &MinimizerScheme;

    /// Number of indexed k-mers `n`; the codomain is `[0, n)`.
    fn num_kmers(&self) -> u64;

    /// K-mers whose minimizer is unambiguous; they occupy `[0, n_unambiguous)`.
    fn num_unambiguous(&self) -> u64;

    /// Number of minimizer slots `|M|`, ambiguous ones included.
    fn num_minimizers(&self) -> u64;

    fn bucket(&self, minimizer: u64) -> Bucket;

    fn fallback(&self) -> &GeneralMphf;

    /// Bits per key of the minimizer MPHF.
    fn minimizer_mphf_bits_per_key(&self) -> f64;

    /// Size of the stored structure in bytes.
    fn serialized_bytes(&self) -> usize;

    fn bits_per_kmer(&self) -> f64 {
        8.0 * self.serialized_bytes() as f64 / self.num_kmers().max(1) as f64
    }

    /// Value of `x`. Members get their unique index; other k-mers get an
    /// arbitrary value in `[0, n)`.
    #[inline]
    fn lookup(&self, x: &Kmer) -> u64 {
        let hit = self.scheme().minimizer(x);
        let bucket = self.bucket(hit.mmer);
        resolve(self, bucket, hit.pos, x, false).unwrap_or(0)
    }

    /// Like [`lookup`](Self::lookup), but reports [`Error::DefiniteMiss`]
    /// when the minimizer position rules `x` out of its super-k-mer.
    fn lookup_checked(&self, x: &Kmer) -> Result<u64> {
        if x.k() != self.scheme().k() {
            return Err(Error::KMismatch {
                expected: self.scheme().k(),
                got: x.k(),
            });
        }
        let hit = self.scheme().minimizer(x);
        let bucket = self.bucket(hit.mmer);
        resolve(self, bucket, hit.pos, x, true)
    }

    /// One result per consecutive k-mer of `query`.
    fn stream<'a>(&'a self, query: &'a [u8], checked: bool) -> Result<StreamLookup<'a, Self>>
    where
        Self: Sized,
    {
        let k = self.scheme().k();
        if query.len() < k {
            return Err(Error::QueryShorterThanK {
                len: query.len(),
                k,
            });
        }
        Ok(StreamLookup {
            f: self,
            windows: self.scheme().windows(query),
            checked,
            cached: None,
        })
    }

    /// Unchecked streaming lookup collected into a vector.
    fn stream_lookup(&self, query: &[u8]) -> Result<Vec<u64>>
    where
        Self: Sized,
    {
        self.stream(query, false)?.collect()
    }
}

#[inline]
fn resolve<H: LpHash + ?Sized>(
    f: &H,
    bucket: Bucket,
    p: u32,
    x: &Kmer,
    checked: bool,
) -> Result<u64> {
    if bucket.is_ambiguous() {
        if f.fallback().is_empty() {
            return if checked {
                Err(Error::DefiniteMiss)
            } else {
                Ok(0)
            };
        }
        return Ok(f.num_unambiguous() + f.fallback().evaluate(x));
    }
    let member = p <= bucket.p1 && bucket.p1 - p < bucket.size;
    if member {
        return Ok(bucket.base + (bucket.p1 - p) as u64);
    }
    if checked {
        return Err(Error::DefiniteMiss);
    }
    let raw = bucket.base as i64 + bucket.p1 as i64 - p as i64;
    Ok(raw.clamp(0, f.num_kmers().saturating_sub(1) as i64) as u64)
}

/// Streaming lookup session over one query string.
///
/// While consecutive k-mers share a minimizer occurrence the bucket is reused
/// and each value is derived from the cached one by position arithmetic.
pub struct StreamLookup<'a, H> {
    f: &'a H,
    windows: MinimizerWindows<'a>,
    checked: bool,
    // (minimizer occurrence, bucket)
    cached: Option<(usize, Bucket)>,
}

impl<H: LpHash> Iterator for StreamLookup<'_, H> {
    type Item = Result<u64>;

    #[inline]
    fn next(&mut self) -> Option<Result<u64>> {
        let win = match self.windows.next()? {
            Ok(w) => w,
            Err(e) => return Some(Err(e)),
        };
        let bucket = match self.cached {
            Some((occ, b)) if occ == win.occurrence => b,
            _ => {
                let b = self.f.bucket(win.mmer);
                self.cached = Some((win.occurrence, b));
                b
            }
        };
        Some(resolve(self.f, bucket, win.pos(), &win.kmer, self.checked))
    }
}
