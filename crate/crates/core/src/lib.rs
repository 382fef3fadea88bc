//! Locality-preserving minimal perfect hashing for k-mers.
//!
//! Given a set of DNA strings in which every k-mer occurs once, the
//! structures here map each k-mer to a distinct integer in `[0, n)` so that
//! k-mers adjacent in a string tend to get adjacent integers. Two layouts are
//! provided: [`LpMphfBasic`] and the smaller [`LpMphfPartitioned`].
//!
//! ```
//! use lpmphf::{BuildOptions, HashSeed, LpHash, LpMphfPartitioned, MinimizerScheme, SpssInput};
//!
//! let spss = SpssInput::new(vec![b"ACGTACGGTTCAGGCATTACG".to_vec()], 11, true).unwrap();
//! let scheme = MinimizerScheme::new(11, 6, HashSeed(1)).unwrap();
//! let f = LpMphfPartitioned::build(&spss, &scheme, &BuildOptions::default()).unwrap();
//! let values = f.stream_lookup(b"ACGTACGGTTCAGGCATTACG").unwrap();
//! let mut sorted = values.clone();
//! sorted.sort();
//! assert_eq!(sorted, (0..11).collect::<Vec<u64>>());
//! ```

pub mod assembly;
pub mod basic;
pub mod container;
pub mod error;
pub mod kmer;
pub mod lookup;
pub mod minimizer;
pub mod mphf;
pub mod partitioned;
pub mod persist;
pub mod spss;
pub mod stats;
pub mod succinct;
pub mod theory;

pub use assembly::BuildOptions;
pub use basic::LpMphfBasic;
pub use container::{AnyLpMphf, Variant};
pub use error::{Error, Result};
pub use kmer::{HashSeed, Kmer};
pub use lookup::LpHash;
pub use minimizer::{MinimizerCensus, MinimizerScheme, SuperKmerRecord};
pub use mphf::GeneralMphf;
pub use partitioned::{FlType, LpMphfPartitioned};
pub use spss::{generate_spss, load_spss, GenConfig, InputFormat, SpssInput};
pub use stats::StatsReport;

pub type TypeProbabilitiesF64 = theory::TypeProbabilities<f64>;
pub type TypeProbabilitiesExact = theory::TypeProbabilities<num_rational::Ratio<i64>>;
pub type TheoryParamsF64 = theory::TheoryParams<f64>;
