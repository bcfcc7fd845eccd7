use std::sync::OnceLock;

use num_bigint::BigInt;
use serde::Serialize;

use super::field::nu_at;
use super::{Pair, Tower, TowerElem, TowerError};
use crate::exact::{rat_int, UPoly};

/// A pair together with its tower up to `max_level`, the degree-doubling
/// status of every level and the minimal polynomials `P_0..P_max`.
///
/// Polynomials are built on first use (each exactly once); everything else
/// is computed in [`TowerCtx::new`].
#[derive(Debug)]
pub struct TowerCtx {
    pair: Pair,
    max_level: usize,
    tower: Tower,
    doubling_to: usize,
    polys: Vec<OnceLock<UPoly>>,
}

impl TowerCtx {
    pub fn new(pair: Pair, max_level: usize) -> Self {
        let tower = Tower::for_pair(&pair, max_level);
        // Level k doubles iff nu + x_{k-1} is not a square in K_{k-1}; once a
        // level collapses the rest of the tower is no longer a field.
        let mut doubling_to = 0;
        for k in 1..=max_level {
            let radicand = tower.generator_square(k);
            let square = tower
                .sqrt(radicand)
                .expect("radicand lives inside the tower")
                .is_some();
            if square {
                break;
            }
            doubling_to = k;
        }
        TowerCtx {
            pair,
            max_level,
            tower,
            doubling_to,
            polys: (0..=max_level).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn pair(&self) -> &Pair {
        &self.pair
    }

    pub fn nu(&self) -> &BigInt {
        &self.pair.nu
    }

    pub fn max_level(&self) -> usize {
        self.max_level
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    /// Largest `L` such that `[K_k : K_{k-1}] = 2` for every `k <= L`.
    pub fn doubling_verified_to(&self) -> usize {
        self.doubling_to
    }

    pub fn doubles_at(&self, level: usize) -> bool {
        level <= self.doubling_to
    }

    /// The first level whose degree collapses, if any within `max_level`.
    pub fn collapse_level(&self) -> Option<usize> {
        (self.doubling_to < self.max_level).then_some(self.doubling_to + 1)
    }

    fn check(&self, level: usize) -> Result<(), TowerError> {
        if level > self.max_level {
            return Err(TowerError::LevelOutOfRange {
                level,
                depth: self.max_level,
            });
        }
        Ok(())
    }

    /// `P_n`, with `P_0 = X - x0` and `P_{n+1}(X) = P_n(X^2 - nu)`.
    pub fn min_poly(&self, n: usize) -> Result<&UPoly, TowerError> {
        self.check(n)?;
        Ok(self.poly(n))
    }

    fn poly(&self, n: usize) -> &UPoly {
        self.polys[n].get_or_init(|| {
            if n == 0 {
                UPoly::new(vec![-rat_int(&self.pair.x0), rat_int(&BigInt::from(1))])
            } else {
                self.poly(n - 1).step(&self.pair.nu)
            }
        })
    }

    /// `x_n` as an element at `level >= n` (for `n = 0` the rational `x0`).
    pub fn x(&self, n: usize, level: usize) -> Result<TowerElem, TowerError> {
        self.check(level)?;
        if n > level {
            return Err(TowerError::TargetAboveLevel {
                target: level,
                level: n,
            });
        }
        let e = if n == 0 {
            TowerElem::rational(rat_int(&self.pair.x0))
        } else {
            TowerElem::generator(n)
        };
        Ok(e.lift(level))
    }

    /// The integer `c` viewed at `level`.
    pub fn int(&self, c: &BigInt, level: usize) -> Result<TowerElem, TowerError> {
        self.check(level)?;
        Ok(TowerElem::constant(level, rat_int(c)))
    }

    /// `nu + x_n` at level `n`.
    pub fn nu_plus_x(&self, n: usize) -> Result<TowerElem, TowerError> {
        Ok(nu_at(&self.pair.nu, n).add_raw(&self.x(n, n)?))
    }

    /// `c - x_n` at level `n`.
    pub fn c_minus_x(&self, c: &BigInt, n: usize) -> Result<TowerElem, TowerError> {
        Ok(self.int(c, n)?.sub_raw(&self.x(n, n)?))
    }
}

/// The integers `u_0 = nu^2 - nu`, `u_{k+1} = u_k^2 - nu`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct USeq {
    #[serde(with = "crate::serde_big")]
    pub nu: BigInt,
    #[serde(with = "crate::serde_big::vec")]
    pub values: Vec<BigInt>,
}

pub fn u_seq(nu: &BigInt, count: usize) -> USeq {
    let mut values = Vec::with_capacity(count);
    let mut u = nu * nu - nu;
    for _ in 0..count {
        let next = &u * &u - nu;
        values.push(std::mem::replace(&mut u, next));
    }
    USeq {
        nu: nu.clone(),
        values,
    }
}
