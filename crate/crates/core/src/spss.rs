//! Spectrum-preserving string set input: loading, validation, and a random
//! generator for test data.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::kmer::{base_code, base_code_at, code_to_base, kmer_mask, Kmer, MAX_K};

/// Text layout of an input file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum InputFormat {
    #[default]
    Fasta,
    /// One sequence per line, no headers.
    Lines,
}

/// An ordered collection of DNA strings, each of length at least `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpssInput {
    k: usize,
    strings: Vec<Vec<u8>>,
    num_kmers: u64,
    total_len: u64,
}

impl SpssInput {
    /// Wraps already-loaded strings. Checks alphabet and minimum length, and
    /// with `validate` also rejects any repeated k-mer.
    pub fn new(strings: Vec<Vec<u8>>, k: usize, validate: bool) -> Result<Self> {
        if k == 0 || k > MAX_K {
            return Err(Error::LengthOutOfRange {
                len: k,
                min: 1,
                max: MAX_K,
            });
        }
        let mut num_kmers = 0u64;
        let mut total_len = 0u64;
        for (record, s) in strings.iter().enumerate() {
            if s.len() < k {
                return Err(Error::StringShorterThanK {
                    record,
                    len: s.len(),
                    k,
                });
            }
            for pos in 0..s.len() {
                base_code_at(s, pos)?;
            }
            num_kmers += (s.len() - k + 1) as u64;
            total_len += s.len() as u64;
        }
        let spss = SpssInput {
            k,
            strings,
            num_kmers,
            total_len,
        };
        if validate {
            spss.check_distinct_kmers()?;
        }
        Ok(spss)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn strings(&self) -> &[Vec<u8>] {
        &self.strings
    }

    pub fn num_strings(&self) -> usize {
        self.strings.len()
    }

    /// Number of k-mers (distinct when the input is a valid SPSS).
    pub fn num_kmers(&self) -> u64 {
        self.num_kmers
    }

    /// Cumulative string length.
    pub fn total_len(&self) -> u64 {
        self.total_len
    }

    /// `(|S| - 1) / n`.
    pub fn fragmentation(&self) -> f64 {
        if self.num_kmers == 0 {
            return 0.0;
        }
        (self.strings.len() as f64 - 1.0) / self.num_kmers as f64
    }

    /// Iterates over all k-mers in string order.
    pub fn kmers(&self) -> impl Iterator<Item = Kmer> + '_ {
        self.strings
            .iter()
            .flat_map(move |s| KmerIter::new(s, self.k))
    }

    pub fn check_distinct_kmers(&self) -> Result<()> {
        let mut seen = HashSet::with_capacity(self.num_kmers as usize);
        for x in self.kmers() {
            if !seen.insert(x.packed()) {
                return Err(Error::DuplicateKmer {
                    kmer: x.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Rejects inputs where the last k-mer of one string overlaps the first
    /// k-mer of another string by `k - 1` bases.
    pub fn check_no_end_overlap(&self) -> Result<()> {
        if self.k == 1 {
            return Ok(());
        }
        let k = self.k;
        let mut heads = std::collections::HashMap::new();
        for (i, s) in self.strings.iter().enumerate() {
            heads.entry(&s[..k - 1]).or_insert(i);
        }
        for (i, s) in self.strings.iter().enumerate() {
            let tail = &s[s.len() - (k - 1)..];
            if let Some(&j) = heads.get(tail) {
                return Err(Error::EndOverlap { from: i, to: j });
            }
        }
        Ok(())
    }

    pub fn write_fasta<W: Write>(&self, mut out: W) -> Result<()> {
        for (i, s) in self.strings.iter().enumerate() {
            writeln!(out, ">{i}")?;
            for line in s.chunks(80) {
                out.write_all(line)?;
                out.write_all(b"\n")?;
            }
        }
        Ok(())
    }
}

/// Loads an input file. FASTA headers are ignored and sequence lines are
/// concatenated per record; LF and CRLF line endings are accepted.
pub fn load_spss<P: AsRef<Path>>(
    path: P,
    k: usize,
    format: InputFormat,
    validate: bool,
) -> Result<SpssInput> {
    let file = File::open(path)?;
    let strings = read_sequences(BufReader::new(file), format)?;
    SpssInput::new(strings, k, validate)
}

pub fn read_sequences<R: Read>(reader: R, format: InputFormat) -> Result<Vec<Vec<u8>>> {
    let mut reader = BufReader::new(reader);
    let mut strings: Vec<Vec<u8>> = Vec::new();
    let mut line = Vec::new();
    let mut lineno = 0;
    let mut in_record = false;
    loop {
        line.clear();
        if reader.read_until(b'\n', &mut line)? == 0 {
            break;
        }
        lineno += 1;
        while matches!(line.last(), Some(b'\n' | b'\r')) {
            line.pop();
        }
        match format {
            InputFormat::Lines => {
                if !line.is_empty() {
                    strings.push(line.clone());
                }
            }
            InputFormat::Fasta => {
                if line.first() == Some(&b'>') {
                    strings.push(Vec::new());
                    in_record = true;
                } else if line.is_empty() {
                    continue;
                } else if !in_record {
                    return Err(Error::MalformedFasta {
                        line: lineno,
                        msg: "sequence data before the first '>' header".into(),
                    });
                } else {
                    strings.last_mut().unwrap().extend_from_slice(&line);
                }
            }
        }
    }
    Ok(strings)
}

/// Iterator over the packed k-mers of one string (ACGT only).
pub struct KmerIter<'a> {
    seq: &'a [u8],
    k: usize,
    pos: usize,
    packed: u128,
}

impl<'a> KmerIter<'a> {
    pub fn new(seq: &'a [u8], k: usize) -> Self {
        let mut packed = 0u128;
        if seq.len() >= k {
            for &b in &seq[..k - 1] {
                packed = (packed << 2) | base_code(b).expect("validated base") as u128;
            }
        }
        KmerIter {
            seq,
            k,
            pos: k - 1,
            packed,
        }
    }
}

impl Iterator for KmerIter<'_> {
    type Item = Kmer;

    #[inline]
    fn next(&mut self) -> Option<Kmer> {
        if self.pos >= self.seq.len() {
            return None;
        }
        let c = base_code(self.seq[self.pos]).expect("validated base");
        self.packed = ((self.packed << 2) | c as u128) & kmer_mask(self.k);
        self.pos += 1;
        Some(Kmer::from_packed(self.packed, self.k))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let rem = self.seq.len().saturating_sub(self.pos);
        (rem, Some(rem))
    }
}

/// Parameters of the random SPSS generator.
#[derive(Clone, Copy, Debug)]
pub struct GenConfig {
    /// Total number of bases over all records.
    pub length: usize,
    pub k: usize,
    pub seed: u64,
    /// Requested number of records; more are emitted if a record cannot be
    /// extended without repeating a k-mer.
    pub records: usize,
}

const MAX_RESTARTS: usize = 64;

/// Random DNA whose k-mers are all distinct, split into records that never
/// overlap each other by `k - 1` bases at their ends.
///
/// Each new base is drawn at random; when it would repeat a k-mer the other
/// three bases are tried, and when all four repeat the record is closed and a
/// new one starts.
pub fn generate_spss(cfg: GenConfig) -> Result<SpssInput> {
    let k = cfg.k;
    if k == 0 || k > MAX_K {
        return Err(Error::LengthOutOfRange {
            len: k,
            min: 1,
            max: MAX_K,
        });
    }
    if cfg.length < k {
        return Err(Error::GenerationFailure(format!(
            "length {} is shorter than k={k}",
            cfg.length
        )));
    }
    let records = cfg.records.clamp(1, cfg.length / k);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut seen: HashSet<u128> = HashSet::with_capacity(cfg.length);
    // (k-1)-mers at the start/end of emitted records.
    let mut heads: HashSet<u128> = HashSet::new();
    let mut tails: HashSet<u128> = HashSet::new();
    let km1_mask = kmer_mask(k - 1);
    let mut out: Vec<Vec<u8>> = Vec::new();
    let mut remaining = cfg.length;

    let mut budget_left = records;
    while remaining >= k {
        let target = if budget_left > 1 {
            (remaining / budget_left).max(k)
        } else {
            remaining
        };
        budget_left = budget_left.saturating_sub(1);

        // First k-mer: fresh, not extending any tail and not a tail itself.
        let mut first = None;
        for _ in 0..MAX_RESTARTS {
            let v: u128 = rng.gen::<u128>() & kmer_mask(k);
            let head = v >> 2;
            if !seen.contains(&v) && !tails.contains(&head) && !heads.contains(&head) {
                first = Some(v);
                break;
            }
        }
        let Some(first) = first else {
            return Err(Error::GenerationFailure(format!(
                "no fresh starting k-mer found for k={k}"
            )));
        };
        seen.insert(first);
        let mut rec: Vec<u8> = (0..k)
            .map(|i| code_to_base((first >> (2 * (k - 1 - i))) as u8))
            .collect();
        let mut kmers = vec![first];
        let mut cur = first;
        while rec.len() < target {
            let start: u8 = rng.gen_range(0..4);
            let mut extended = false;
            for d in 0..4u8 {
                let c = (start + d) & 3;
                let next = ((cur << 2) | c as u128) & kmer_mask(k);
                if !seen.contains(&next) {
                    seen.insert(next);
                    kmers.push(next);
                    rec.push(code_to_base(c));
                    cur = next;
                    extended = true;
                    break;
                }
            }
            if !extended {
                break;
            }
        }
        // Trim until the tail does not lead into an existing record head.
        let head = first >> 2;
        loop {
            let tail = cur & km1_mask;
            if !heads.contains(&tail) && tail != head {
                break;
            }
            if kmers.len() == 1 {
                return Err(Error::GenerationFailure(format!(
                    "record tail overlaps an existing head for k={k}"
                )));
            }
            seen.remove(&kmers.pop().unwrap());
            rec.pop();
            cur = *kmers.last().unwrap();
        }
        heads.insert(head);
        tails.insert(cur & km1_mask);
        remaining -= rec.len();
        out.push(rec);
    }
    SpssInput::new(out, k, false)
}
