use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid base {base:?} at position {pos}")]
    InvalidBase { base: char, pos: usize },

    #[error("length {len} out of range (expected {min}..={max})")]
    LengthOutOfRange { len: usize, min: usize, max: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("malformed FASTA at line {line}: {msg}")]
    MalformedFasta { line: usize, msg: String },

    #[error("record {record} has length {len}, shorter than k={k}")]
    StringShorterThanK { record: usize, len: usize, k: usize },

    #[error("k-mer {kmer} occurs more than once")]
    DuplicateKmer { kmer: String },

    #[error("last k-mer of record {from} overlaps the first k-mer of record {to} by k-1 bases")]
    EndOverlap { from: usize, to: usize },

    #[error("sequence is not monotone at index {index}")]
    NotMonotone { index: usize },

    #[error("universe {universe} is smaller than the largest value {value}")]
    UniverseTooSmall { universe: u64, value: u64 },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("duplicate key in MPHF input")]
    DuplicateKey,

    #[error("MPHF construction failed after {attempts} attempts")]
    ConstructionFailure { attempts: u32 },

    #[error("function has no keys")]
    EmptyFunction,

    #[error("k-mer cannot be a member of the indexed set")]
    DefiniteMiss,

    #[error("query of length {len} is shorter than k={k}")]
    QueryShorterThanK { len: usize, k: usize },

    #[error("k mismatch: structure has k={expected}, got {got}")]
    KMismatch { expected: usize, got: usize },

    #[error("bad magic bytes {0:?}")]
    BadMagic([u8; 4]),

    #[error("unsupported format version {0}")]
    UnsupportedVersion(u32),

    #[error("corrupt structure file: {0}")]
    Corrupt(String),

    #[error("could not generate distinct k-mers: {0}")]
    GenerationFailure(String),
}
