//! Arithmetic in the towers `K_n = Q(x_n)`, `x_{n+1} = sqrt(nu + x_n)`.
//!
//! Elements are stored recursively as `a + b*x_n` with `a`, `b` one level
//! down. The same machinery handles ad-hoc quadratic extensions (any
//! generator square at the top level), which is how `K_n(sqrt d)` is built.

mod conj;
mod ctx;
mod elem;
mod field;
mod linalg;
mod real;

pub use conj::{
    conjugates_numeric, elem_conjugates, first_non_real_level, x_conjugates, Precision,
    DEFAULT_DIGITS, MAX_DIGITS, STURM_MAX_LEVEL,
};
pub use ctx::{u_seq, TowerCtx, USeq};
pub use elem::TowerElem;
pub use field::{ArithOp, Tower};
pub use linalg::{degree_over_q, express_in_powers, power_span, Span};
pub use real::{decimal, CertReal};

use std::fmt;

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::ExactError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TowerError {
    #[error("invalid pair (nu = {nu}, x0 = {x0}): need nu >= 2 and x0 >= 0")]
    InvalidPair { nu: BigInt, x0: BigInt },
    #[error("operands live at different levels ({left} and {right})")]
    LevelMismatch { left: usize, right: usize },
    #[error("level {level} is beyond the tower depth {depth}")]
    LevelOutOfRange { level: usize, depth: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("norm_down needs an element above level 0")]
    LevelZeroNorm,
    #[error("target level {target} is above the element level {level}")]
    TargetAboveLevel { target: usize, level: usize },
    #[error("the tower is not totally real at level {level}")]
    NotTotallyReal { level: usize },
    #[error("could not certify the result with {digits} decimal digits")]
    PrecisionExhausted { digits: u32 },
    #[error("{given} coefficients given but level {level} allows at most {max}")]
    TooManyCoefficients {
        given: usize,
        level: usize,
        max: usize,
    },
    #[error("interval and Sturm total-reality checks disagree at level {level}")]
    CertificationMismatch { level: usize },
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// The parameters `(nu, x0)` of a tower.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pair {
    #[serde(with = "crate::serde_big")]
    pub nu: BigInt,
    #[serde(with = "crate::serde_big")]
    pub x0: BigInt,
}

impl Pair {
    pub fn new(nu: i64, x0: i64) -> Result<Self, TowerError> {
        Self::from_big(nu.into(), x0.into())
    }

    pub fn from_big(nu: BigInt, x0: BigInt) -> Result<Self, TowerError> {
        if nu < BigInt::from(2) || x0.is_negative() {
            return Err(TowerError::InvalidPair { nu, x0 });
        }
        Ok(Pair { nu, x0 })
    }

    /// `u_0 = nu^2 - nu`
    pub fn u0(&self) -> BigInt {
        &self.nu * &self.nu - &self.nu
    }

    pub fn nu_plus_x0(&self) -> BigInt {
        &self.nu + &self.x0
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.nu, self.x0)
    }
}
