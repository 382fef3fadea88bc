//! Closed-form density, type probabilities and space bounds.
//!
//! Density and type probabilities are generic over [`Scalar`], so they can
//! be evaluated exactly over rationals as well as in floating point. Space
//! bounds involve logarithms and need a [`Float`].

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{Float, Num};

use crate::error::{Error, Result};

/// Default additive constant standing in for the lower-order terms.
pub const DEFAULT_LITTLE_OH: f64 = 0.5;

/// Number type the closed forms are evaluated in.
pub trait Scalar: Num + Clone + PartialOrd + Debug {
    fn from_u32(v: u32) -> Self;
}

impl Scalar for f32 {
    fn from_u32(v: u32) -> Self {
        v as f32
    }
}

impl Scalar for f64 {
    fn from_u32(v: u32) -> Self {
        v as f64
    }
}

impl Scalar for Ratio<i64> {
    fn from_u32(v: u32) -> Self {
        Ratio::from_integer(v as i64)
    }
}

impl Scalar for Ratio<i128> {
    fn from_u32(v: u32) -> Self {
        Ratio::from_integer(v as i128)
    }
}

/// Expected fraction of positions that start a new minimizer, `2/(w+1)`.
pub fn density<T: Scalar>(w: u32) -> T {
    assert!(w >= 1, "w must be at least 1");
    T::from_u32(2) / T::from_u32(w + 1)
}

/// Probabilities of the four super-k-mer types.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TypeProbabilities<T> {
    pub left_right_max: T,
    pub left_max: T,
    pub right_max: T,
    pub non_max: T,
}

impl<T: Clone> TypeProbabilities<T> {
    /// In the order left-right-max, left-max, right-max, non-max.
    pub fn as_array(&self) -> [T; 4] {
        [
            self.left_right_max.clone(),
            self.left_max.clone(),
            self.right_max.clone(),
            self.non_max.clone(),
        ]
    }
}

impl<T: Scalar> TypeProbabilities<T> {
    pub fn sum(&self) -> T {
        self.as_array()
            .into_iter()
            .fold(T::zero(), |acc, p| acc + p)
    }
}

/// `W = (w-1)/(2w)`.
pub fn side_probability<T: Scalar>(w: u32) -> T {
    assert!(w >= 1, "w must be at least 1");
    (T::from_u32(w) - T::one()) / (T::from_u32(2) * T::from_u32(w))
}

pub fn type_probabilities<T: Scalar>(w: u32) -> TypeProbabilities<T> {
    let side = side_probability::<T>(w);
    let both = side.clone() * side.clone();
    let one_side = side.clone() * (T::one() - side);
    TypeProbabilities {
        left_right_max: both.clone() + T::one() / T::from_u32(w),
        left_max: one_side.clone(),
        right_max: one_side,
        non_max: both,
    }
}

/// Inputs of the space bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TheoryParams<T> {
    pub k: u32,
    pub m: u32,
    /// Bits per key of the inner MPHF.
    pub b: T,
    pub little_oh: T,
}

impl<T: Float + Debug> TheoryParams<T> {
    pub fn new(k: u32, m: u32, b: T) -> Result<Self> {
        let little_oh = T::from(DEFAULT_LITTLE_OH).unwrap();
        Self::with_little_oh(k, m, b, little_oh)
    }

    pub fn with_little_oh(k: u32, m: u32, b: T, little_oh: T) -> Result<Self> {
        if m == 0 || m > k {
            return Err(Error::InvalidParams(format!(
                "need 1 <= m <= k, got k={k} m={m}"
            )));
        }
        if b.is_nan() || b <= T::from(std::f64::consts::LOG2_E).unwrap() {
            return Err(Error::InvalidParams(format!("b={b:?} must exceed log2(e)")));
        }
        Ok(TheoryParams { k, m, b, little_oh })
    }

    pub fn w(&self) -> u32 {
        self.k - self.m + 1
    }

    fn per_kmer(&self, log_term: T) -> T {
        let d = T::from(2).unwrap() / T::from(self.w() + 1).unwrap();
        d * (log_term + self.b + self.little_oh)
    }

    /// Bits per k-mer of the un-partitioned layout,
    /// `d·(log2(4(w+1)^2) + b + little_oh)`.
    pub fn basic_bits_per_kmer(&self) -> T {
        let w1 = T::from(self.w() + 1).unwrap();
        self.per_kmer((T::from(4).unwrap() * w1 * w1).log2())
    }

    /// Bits per k-mer of the partitioned layout,
    /// `d·(log2(c·(w+1)) + b + little_oh)` with `c = 16·2^(1/4)/3`.
    pub fn partitioned_bits_per_kmer(&self) -> T {
        let w1 = T::from(self.w() + 1).unwrap();
        self.per_kmer((partitioned_constant::<T>() * w1).log2())
    }

    pub fn space_bound_basic(&self, n: u64) -> T {
        T::from(n).unwrap() * self.basic_bits_per_kmer()
    }

    pub fn space_bound_partitioned(&self, n: u64) -> T {
        T::from(n).unwrap() * self.partitioned_bits_per_kmer()
    }

    /// Extra bits per k-mer spent on a fallback holding a fraction `xi`.
    pub fn fallback_bits_per_kmer(&self, xi: T) -> T {
        xi * self.b
    }
}

/// `16·2^(1/4)/3`.
pub fn partitioned_constant<T: Float>() -> T {
    T::from(16).unwrap() * T::from(2).unwrap().powf(T::from(0.25).unwrap()) / T::from(3).unwrap()
}
