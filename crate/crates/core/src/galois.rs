//! Irreducibility and Galois groups of biquadratic quartics `X^4 + bX^2 + d`
//! over `Q` and over the tower fields, specialized to the two-step
//! extensions `K_{n+2} / K_n`.
//!
//! Everything here is characteristic zero, so the usual `char != 2`
//! hypothesis of the quartic criteria holds automatically.

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::exact::{is_perfect_square, rat, rat_int};
use crate::tower::{Pair, Tower, TowerCtx, TowerElem, TowerError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum GaloisType {
    Reducible,
    V4,
    C4,
    D4,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GaloisError {
    #[error("degree doubling is verified only to level {verified}, level {needed} is required")]
    DoublingNotVerified { needed: usize, verified: usize },
    #[error("pair {0} is not in Omega^1 (u0 - x0 must be a^2 with 1 <= a <= nu - 1 and K_2 of degree 4)")]
    NotOmega1(Pair),
    #[error("epsilon must be +1 or -1, got {0}")]
    BadEpsilon(i8),
    #[error(transparent)]
    Tower(#[from] TowerError),
}

/// Which test settled irreducibility.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum IrreducibilityRoute {
    /// `b^2 - 4d` a square (reducible), or `b^2 - 4d` and `d` both
    /// non-squares (irreducible, since then neither `alpha^2` nor
    /// `alpha*beta` lies in the base).
    FastPath,
    /// `d` is a square, so the `-b +- 2 sqrt(d)` conditions decide.
    FullCriterion,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Irreducibility {
    pub irreducible: bool,
    pub route: IrreducibilityRoute,
}

fn check_levels(tower: &Tower, b: &TowerElem, d: &TowerElem) -> Result<Tower, TowerError> {
    if b.level() != d.level() {
        return Err(TowerError::LevelMismatch {
            left: b.level(),
            right: d.level(),
        });
    }
    if b.level() > tower.depth() {
        return Err(TowerError::LevelOutOfRange {
            level: b.level(),
            depth: tower.depth(),
        });
    }
    Ok(tower.truncate(b.level()))
}

fn discriminant(tower: &Tower, b: &TowerElem, d: &TowerElem) -> Result<TowerElem, TowerError> {
    let bb = tower.mul(b, b)?;
    bb.sub(&d.scale(&rat(4)))
}

/// The fast route alone: `Some` when it settles the question.
pub fn biquad_irreducible_fast(
    tower: &Tower,
    b: &TowerElem,
    d: &TowerElem,
) -> Result<Option<bool>, TowerError> {
    let base = check_levels(tower, b, d)?;
    if base.is_square(&discriminant(&base, b, d)?)? {
        return Ok(Some(false));
    }
    if !base.is_square(d)? {
        return Ok(Some(true));
    }
    Ok(None)
}

/// The full criterion: `X^4 + bX^2 + d` is irreducible over `K` iff
/// `b^2 - 4d` is not a square in `K` and neither `-b + 2 delta` nor
/// `-b - 2 delta` is the square of an element of `K`, where
/// `delta^2 = d`. When `d` is not a square in `K`, `delta` is the generator
/// of the formal extension `K(sqrt d)` and square roots found there count
/// only if they lie in `K`.
pub fn biquad_irreducible_full(
    tower: &Tower,
    b: &TowerElem,
    d: &TowerElem,
) -> Result<bool, TowerError> {
    let base = check_levels(tower, b, d)?;
    let n = b.level();
    if base.is_square(&discriminant(&base, b, d)?)? {
        return Ok(false);
    }
    let (field, delta, b_up) = match base.sqrt(d)? {
        Some(delta) => (base.clone(), delta, b.clone()),
        None => (
            base.extend(d.clone())?,
            TowerElem::generator(n + 1),
            b.clone().lift(n + 1),
        ),
    };
    for sign in [1, -1] {
        let cand = b_up.neg().add(&delta.scale(&rat(2 * sign)))?;
        if let Some(w) = field.sqrt(&cand)? {
            if w.lower(n).is_some() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn biquad_irreducible_routed(
    tower: &Tower,
    b: &TowerElem,
    d: &TowerElem,
) -> Result<Irreducibility, TowerError> {
    if let Some(irreducible) = biquad_irreducible_fast(tower, b, d)? {
        return Ok(Irreducibility {
            irreducible,
            route: IrreducibilityRoute::FastPath,
        });
    }
    Ok(Irreducibility {
        irreducible: biquad_irreducible_full(tower, b, d)?,
        route: IrreducibilityRoute::FullCriterion,
    })
}

pub fn biquad_irreducible(tower: &Tower, b: &TowerElem, d: &TowerElem) -> Result<bool, TowerError> {
    Ok(biquad_irreducible_routed(tower, b, d)?.irreducible)
}

/// Reducible, or for irreducible quartics: `V4` iff `d` is a square, `C4`
/// iff `d (b^2 - 4d)` is a square, `D4` otherwise.
pub fn biquad_galois_type(
    tower: &Tower,
    b: &TowerElem,
    d: &TowerElem,
) -> Result<GaloisType, TowerError> {
    if !biquad_irreducible(tower, b, d)? {
        return Ok(GaloisType::Reducible);
    }
    let base = tower.truncate(b.level());
    if base.is_square(d)? {
        return Ok(GaloisType::V4);
    }
    let prod = base.mul(d, &discriminant(&base, b, d)?)?;
    if base.is_square(&prod)? {
        Ok(GaloisType::C4)
    } else {
        Ok(GaloisType::D4)
    }
}

/// Galois type of `K_{n+2} / K_n` plus the rational necessary conditions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step2Report {
    pub n: usize,
    pub galois: GaloisType,
    /// `u_n - x0`, the norm of `u_0 - x_n` down to `Q`.
    #[serde(with = "crate::serde_big")]
    pub un_minus_x0: BigInt,
    /// `u_n - x0` is a perfect square (needed for `V4`).
    pub v4_possible: bool,
    /// `f_n = (u_{n-1} - x0)(u_n - x0)`, defined for `n >= 1`.
    #[serde(with = "crate::serde_big::opt")]
    pub f_n: Option<BigInt>,
    /// `f_n` is a perfect square (needed for `C4`).
    pub c4_possible: Option<bool>,
}

/// The minimal polynomial of `x_{n+2}` over `K_n` is
/// `X^4 - 2 nu X^2 + (u_0 - x_n)`; classify it.
pub fn step2_galois_type(ctx: &TowerCtx, n: usize) -> Result<Step2Report, GaloisError> {
    let needed = n + 2;
    if !ctx.doubles_at(needed) {
        return Err(GaloisError::DoublingNotVerified {
            needed,
            verified: ctx.doubling_verified_to(),
        });
    }
    let pair = ctx.pair();
    let b = TowerElem::constant(n, rat_int(&(-BigInt::from(2) * &pair.nu)));
    let d = ctx.c_minus_x(&pair.u0(), n)?;
    let galois = biquad_galois_type(ctx.tower(), &b, &d)?;

    let u = crate::tower::u_seq(&pair.nu, n + 1).values;
    let un = &u[n] - &pair.x0;
    let v4_possible = is_perfect_square(&un).is_some();
    let (f_n, c4_possible) = if n >= 1 {
        let f = (&u[n - 1] - &pair.x0) * &un;
        let sq = is_perfect_square(&f).is_some();
        (Some(f), Some(sq))
    } else {
        (None, None)
    };
    Ok(Step2Report {
        n,
        galois,
        un_minus_x0: un,
        v4_possible,
        f_n,
        c4_possible,
    })
}

/// `a` with `u0 - x0 = a^2`, `1 <= a <= nu - 1`, provided `K_2` has degree 4.
pub fn omega1_a(pair: &Pair) -> Option<BigInt> {
    let a = is_perfect_square(&(pair.u0() - &pair.x0))?;
    if a < BigInt::from(1) || a > &pair.nu - 1 {
        return None;
    }
    TowerCtx::new(pair.clone(), 2).doubles_at(2).then_some(a)
}

/// Whether `K_3 / Q(y_eps)` can be a Klein extension, where
/// `y_eps = sqrt(2(nu + eps a))`: decided by `a^2 + nu^4 - 2 nu^3` being a
/// perfect square (the discriminant of the relevant quartic is 16 times it).
pub fn klein_over_yeps(pair: &Pair, eps: i8) -> Result<bool, GaloisError> {
    if eps != 1 && eps != -1 {
        return Err(GaloisError::BadEpsilon(eps));
    }
    let a = omega1_a(pair).ok_or_else(|| GaloisError::NotOmega1(pair.clone()))?;
    let nu = &pair.nu;
    let nu3 = nu * nu * nu;
    let disc = &a * &a + &nu3 * nu - BigInt::from(2) * &nu3;
    Ok(is_perfect_square(&disc).is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, Rat};
    use proptest::prelude::*;

    fn q(b: i64, d: i64) -> (TowerElem, TowerElem) {
        (TowerElem::rational(rat(b)), TowerElem::rational(rat(d)))
    }

    fn ctx(nu: i64, x0: i64, d: usize) -> TowerCtx {
        TowerCtx::new(Pair::new(nu, x0).unwrap(), d)
    }

    #[test]
    fn irreducibility_examples() {
        let t = Tower::rationals();
        let (b, d) = q(-4, 2);
        assert!(biquad_irreducible(&t, &b, &d).unwrap());
        assert!(biquad_irreducible_full(&t, &b, &d).unwrap());
        let (b, d) = q(-4, 4);
        assert!(!biquad_irreducible(&t, &b, &d).unwrap());
        let (b, d) = q(-4, 1);
        let r = biquad_irreducible_routed(&t, &b, &d).unwrap();
        assert!(r.irreducible);
        assert_eq!(r.route, IrreducibilityRoute::FullCriterion);
        // X^4 - 6X^2 + 1 = (X^2 - 2X - 1)(X^2 + 2X - 1): d square, -b - 2 = 4 square.
        let (b, d) = q(-6, 1);
        assert!(!biquad_irreducible(&t, &b, &d).unwrap());
    }

    #[test]
    fn galois_examples() {
        let t = Tower::rationals();
        let ty = |b, d| {
            let (b, d) = q(b, d);
            biquad_galois_type(&t, &b, &d).unwrap()
        };
        assert_eq!(ty(-4, 1), GaloisType::V4);
        assert_eq!(ty(-4, 2), GaloisType::C4);
        assert_eq!(ty(-6, 6), GaloisType::D4);
        assert_eq!(ty(-4, 4), GaloisType::Reducible);
    }

    #[test]
    fn step2_examples() {
        assert_eq!(
            step2_galois_type(&ctx(2, 1, 2), 0).unwrap().galois,
            GaloisType::V4
        );
        assert_eq!(
            step2_galois_type(&ctx(2, 0, 2), 0).unwrap().galois,
            GaloisType::C4
        );
        assert_eq!(
            step2_galois_type(&ctx(3, 0, 2), 0).unwrap().galois,
            GaloisType::D4
        );
        let r = step2_galois_type(&ctx(4, 3, 3), 1).unwrap();
        assert_eq!(r.f_n, Some(BigInt::from(9 * 137)));
        assert_eq!(r.c4_possible, Some(false));
        assert!(matches!(
            step2_galois_type(&ctx(3, 5, 4), 0),
            Err(GaloisError::DoublingNotVerified {
                needed: 2,
                verified: 1
            })
        ));
    }

    #[test]
    fn klein_over_yeps_examples() {
        let p = |nu, x0| Pair::new(nu, x0).unwrap();
        assert!(klein_over_yeps(&p(2, 1), 1).unwrap());
        assert!(klein_over_yeps(&p(2, 1), -1).unwrap());
        assert!(!klein_over_yeps(&p(4, 3), 1).unwrap());
        assert!(!klein_over_yeps(&p(3, 2), -1).unwrap());
        assert!(matches!(
            klein_over_yeps(&p(3, 0), 1),
            Err(GaloisError::NotOmega1(_))
        ));
        assert!(matches!(
            klein_over_yeps(&p(2, 1), 0),
            Err(GaloisError::BadEpsilon(0))
        ));
    }

    // V4 needs u_0 - x_n square in K_n; C4 needs f_n square in Q.
    #[test]
    fn step2_types_respect_rational_obstructions() {
        for (nu, x0) in [(2, 0), (2, 1), (3, 0), (3, 2), (4, 3), (5, 0), (5, 1)] {
            let c = ctx(nu, x0, 6);
            for n in 1..=4 {
                let r = step2_galois_type(&c, n).unwrap();
                if r.galois == GaloisType::V4 {
                    let d = c.c_minus_x(&c.pair().u0(), n).unwrap();
                    assert!(c.tower().is_square(&d).unwrap());
                    assert!(r.v4_possible);
                }
                if r.galois == GaloisType::C4 {
                    assert_eq!(r.c4_possible, Some(true));
                }
            }
        }
    }

    #[test]
    fn non_square_u0_minus_x0_never_klein() {
        for (nu, x0) in [(2, 0), (3, 0), (5, 0), (6, 0), (5, 1)] {
            let c = ctx(nu, x0, 6);
            for n in 0..=4 {
                assert_ne!(
                    step2_galois_type(&c, n).unwrap().galois,
                    GaloisType::V4,
                    "({nu},{x0}) n={n}"
                );
            }
        }
    }

    fn small_level1() -> impl Strategy<Value = TowerElem> {
        proptest::collection::vec(-6i64..=6, 2)
            .prop_map(|c| TowerElem::from_flat(&c.into_iter().map(rat).collect::<Vec<Rat>>()))
    }

    proptest! {
        // Both routes must agree whenever the fast one decides.
        #[test]
        fn fast_and_full_routes_agree(b in small_level1(), d in small_level1(), nu in 2i64..6) {
            let t = Tower::for_pair(&Pair::new(nu, 0).unwrap(), 1);
            let full = biquad_irreducible_full(&t, &b, &d).unwrap();
            if let Some(fast) = biquad_irreducible_fast(&t, &b, &d).unwrap() {
                prop_assert_eq!(fast, full);
            }
        }

        #[test]
        fn rational_routes_agree(b in -12i64..=12, d in -12i64..=12) {
            let t = Tower::rationals();
            let (b, d) = q(b, d);
            let full = biquad_irreducible_full(&t, &b, &d).unwrap();
            if let Some(fast) = biquad_irreducible_fast(&t, &b, &d).unwrap() {
                prop_assert_eq!(fast, full);
            }
        }
    }
}
