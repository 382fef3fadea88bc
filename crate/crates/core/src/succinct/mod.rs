//! Rank-supported bit vectors, Elias-Fano sequences, packed integer arrays,
//! and a 4-symbol wavelet tree.

mod bitvec;
mod elias_fano;
mod int_vec;
mod type_seq;

pub use bitvec::{BitBuilder, RankBitvector};
pub use elias_fano::EliasFanoSeq;
pub use int_vec::{bits_for, CompactVector};
pub use type_seq::TypeSequence;
