//! Exact rational and polynomial arithmetic.
//!
//! Everything else in the crate sits on top of this module: integer square
//! detection, square-free parts, univariate polynomials over `Q` and exact
//! real-root counting by Sturm chains.

mod int;
mod poly;
mod sturm;

pub use int::{
    factorize, is_perfect_square, isqrt, rat_is_square, square_free_part, square_free_part_with,
    DEFAULT_TRIAL_BOUND,
};
pub use poly::{poly_step, UPoly};
pub use sturm::{isolate_real_roots, sturm_count, ExtRat, SturmChain};

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("square root of a negative integer {0}")]
    NegativeSqrt(BigInt),
    #[error("square-free part of zero is undefined")]
    ZeroSquareFree,
    #[error("Sturm counting needs a nonzero polynomial")]
    ZeroPolynomial,
    #[error("empty interval: lower endpoint must be below upper endpoint")]
    EmptyInterval,
}

/// Shorthand for an integer-valued rational.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: &BigInt) -> Rat {
    Rat::from_integer(n.clone())
}
