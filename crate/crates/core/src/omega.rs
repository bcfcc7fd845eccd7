//! Membership of pairs in `Omega` (every step has degree 2 and the tower is
//! totally real) to a finite depth, the increasing/decreasing labels,
//! thinness, the `u_n`/`f_n` scans and the parametrized families
//! `Omega^1 = Sigma`, `Sigma1`, `Sigma2`.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::exact::{is_perfect_square, square_free_part, sturm_count, ExtRat};
use crate::galois::{step2_galois_type, GaloisError, Step2Report};
use crate::tower::{
    first_non_real_level, u_seq, Pair, Precision, TowerCtx, TowerError, STURM_MAX_LEVEL,
};

pub const DEFAULT_DEPTH: usize = 6;
pub const DEFAULT_EC_BOUND: u64 = 1_000_000;
pub const DEFAULT_FN_COUNT: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum FailReason {
    DegreeCollapse,
    NotTotallyReal,
    OutsideInequalityRegions,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "status")]
pub enum OmegaClass {
    NotInOmegaAtDepth { level: usize, reason: FailReason },
    IncVerified { depth: usize },
    DecVerified { depth: usize },
}

impl OmegaClass {
    pub fn in_omega(&self) -> bool {
        !matches!(self, OmegaClass::NotInOmegaAtDepth { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            OmegaClass::NotInOmegaAtDepth { .. } => "NotInOmegaAtDepth",
            OmegaClass::IncVerified { .. } => "IncVerified",
            OmegaClass::DecVerified { .. } => "DecVerified",
        }
    }
}

fn sturm_real_to(pair: &Pair, m: usize) -> Result<bool, TowerError> {
    let ctx = TowerCtx::new(pair.clone(), m);
    let p = ctx.min_poly(m)?;
    Ok(sturm_count(p, &ExtRat::NegInf, &ExtRat::PosInf)? == 1 << m)
}

/// Verify degree doubling and total reality through `depth`, then apply the
/// inequality labels: increasing when `nu > x0^2 - x0`, decreasing when
/// `nu < x0^2 - x0` and `x0 < nu^2 - nu`.
///
/// Total reality is certified by interval arithmetic on the radicands at
/// every level and, up to level 6, confirmed exactly by a Sturm count of
/// `P_n`.
pub fn classify_pair(pair: &Pair, depth: usize) -> Result<OmegaClass, TowerError> {
    classify_pair_with(pair, depth, Precision::default())
}

pub fn classify_pair_with(
    pair: &Pair,
    depth: usize,
    precision: Precision,
) -> Result<OmegaClass, TowerError> {
    assert!(depth >= 1, "depth must be at least 1");
    let ctx = TowerCtx::new(pair.clone(), depth);
    let collapse = ctx.collapse_level();
    // Reality of K_k only involves radicands below level k; past a collapse
    // a radicand may vanish, so stop before it.
    let real_depth = collapse.map_or(depth, |c| c - 1);
    let non_real = first_non_real_level(pair, real_depth, precision)?;

    let m = real_depth.min(STURM_MAX_LEVEL);
    if m >= 1 {
        let intervals_real = non_real.is_none_or(|r| r > m);
        if sturm_real_to(pair, m)? != intervals_real {
            return Err(TowerError::CertificationMismatch { level: m });
        }
    }

    if let Some(level) = non_real {
        return Ok(OmegaClass::NotInOmegaAtDepth {
            level,
            reason: FailReason::NotTotallyReal,
        });
    }
    if let Some(level) = collapse {
        return Ok(OmegaClass::NotInOmegaAtDepth {
            level,
            reason: FailReason::DegreeCollapse,
        });
    }
    let (nu, x0) = (&pair.nu, &pair.x0);
    let pivot = x0 * x0 - x0;
    if *nu > pivot {
        Ok(OmegaClass::IncVerified { depth })
    } else if *nu < pivot && *x0 < pair.u0() {
        Ok(OmegaClass::DecVerified { depth })
    } else {
        Ok(OmegaClass::NotInOmegaAtDepth {
            level: depth,
            reason: FailReason::OutsideInequalityRegions,
        })
    }
}

/// Elementary sufficient conditions for the degree to double at every step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum IncreaseCriterion {
    /// `nu + x0 = 2 or 3 (mod 4)`.
    Mod4,
    /// `x0 = 0` and `nu` is not a square.
    ZeroNonSquare,
    Unknown,
}

pub fn increase_sufficient(pair: &Pair) -> IncreaseCriterion {
    let r = pair.nu_plus_x0().mod_floor(&BigInt::from(4));
    if r == BigInt::from(2) || r == BigInt::from(3) {
        IncreaseCriterion::Mod4
    } else if pair.x0.is_zero() && is_perfect_square(&pair.nu).is_none() {
        IncreaseCriterion::ZeroNonSquare
    } else {
        IncreaseCriterion::Unknown
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThinCert {
    pub thin: bool,
    #[serde(with = "crate::serde_big")]
    pub u0_minus_x0: BigInt,
    /// `a` with `u0 - x0 = a^2` when the tower is not thin.
    #[serde(with = "crate::serde_big::opt")]
    pub a: Option<BigInt>,
}

/// For a pair in `Omega`: thin iff `u0 - x0` is not a perfect square.
pub fn is_thin(pair: &Pair) -> ThinCert {
    let d = pair.u0() - &pair.x0;
    let a = is_perfect_square(&d);
    ThinCert {
        thin: a.is_none(),
        u0_minus_x0: d,
        a,
    }
}

/// Galois types of `K_{n+2}/K_n` for `n = 0..=max_n`.
pub fn klein_witness_scan(ctx: &TowerCtx, max_n: usize) -> Result<Vec<Step2Report>, GaloisError> {
    (0..=max_n).map(|n| step2_galois_type(ctx, n)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FnEntry {
    pub n: usize,
    #[serde(with = "crate::serde_big")]
    pub f_n: BigInt,
    pub is_square: bool,
}

/// `f_n = (u_{n-1} - x0)(u_n - x0)` for `n = 1..=count`.
pub fn fn_scan(pair: &Pair, count: usize) -> Vec<FnEntry> {
    let u = u_seq(&pair.nu, count + 1).values;
    (1..=count)
        .map(|n| {
            let f = (&u[n - 1] - &pair.x0) * (&u[n] - &pair.x0);
            let is_square = is_perfect_square(&f).is_some();
            FnEntry {
                n,
                f_n: f,
                is_square,
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EcHit {
    pub x: i64,
    /// Nonnegative `y` with `y^2 = (x - x0)(x^2 - nu - x0)`.
    #[serde(with = "crate::serde_big")]
    pub y: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UCross {
    /// The `n` with `x = u_{n-1}`.
    pub n: usize,
    #[serde(with = "crate::serde_big")]
    pub u: BigInt,
    pub hit: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EcScan {
    pub bound: u64,
    pub hits: Vec<EcHit>,
    pub u_cross: Vec<UCross>,
}

fn ec_value_small(x: i128, x0: i128, c: i128) -> Option<i128> {
    (x - x0).checked_mul(x.checked_mul(x)? - c)
}

/// All integers `|x| <= bound` with `(x - x0)(x^2 - (nu + x0))` a perfect
/// square, by direct search. The integral points of this curve are finite
/// but not effectively bounded, so `bound` is a search parameter only.
pub fn ec_point_scan(pair: &Pair, bound: u64) -> EcScan {
    let b = bound as i64;
    let small = pair
        .x0
        .to_i128()
        .zip(pair.nu_plus_x0().to_i128())
        .filter(|(x0, c)| x0.abs() < 1 << 40 && c.abs() < 1 << 40 && bound < 1 << 40);
    let hits: Vec<EcHit> = (-b..=b)
        .into_par_iter()
        .filter_map(|x| {
            let v = match small {
                Some((x0, c)) => match ec_value_small(x as i128, x0, c) {
                    Some(v) => BigInt::from(v),
                    None => ec_value_big(pair, x),
                },
                None => ec_value_big(pair, x),
            };
            if v.is_negative() {
                return None;
            }
            let y = match v.to_u128() {
                Some(u) => {
                    let r = u.sqrt();
                    (r * r == u).then(|| BigInt::from(r))
                }
                None => is_perfect_square(&v),
            }?;
            Some(EcHit { x, y })
        })
        .collect();

    let mut u_cross = Vec::new();
    let mut u = pair.u0();
    let bound_big = BigInt::from(bound);
    for n in 1.. {
        if u > bound_big {
            break;
        }
        let hit = u.to_i64().is_some_and(|uv| hits.iter().any(|h| h.x == uv));
        u_cross.push(UCross {
            n,
            u: u.clone(),
            hit,
        });
        let next = &u * &u - &pair.nu;
        if next == u {
            break;
        }
        u = next;
    }
    EcScan {
        bound,
        hits,
        u_cross,
    }
}

fn ec_value_big(pair: &Pair, x: i64) -> BigInt {
    let x = BigInt::from(x);
    (&x - &pair.x0) * (&x * &x - pair.nu_plus_x0())
}

/// The certificate of an `Omega^1` pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Omega1Cert {
    #[serde(with = "crate::serde_big")]
    pub a: BigInt,
    /// `2(nu - a)`, `2(nu + a)`, `nu + x0`.
    #[serde(with = "crate::serde_big::vec")]
    pub generators: Vec<BigInt>,
    /// Square-free parts of the three generators.
    #[serde(with = "crate::serde_big::vec")]
    pub square_free: Vec<BigInt>,
    pub pairwise_distinct: bool,
}

impl Omega1Cert {
    pub fn new(pair: &Pair, a: BigInt) -> Self {
        let two = BigInt::from(2);
        let generators = vec![
            &two * (&pair.nu - &a),
            &two * (&pair.nu + &a),
            pair.nu_plus_x0(),
        ];
        let square_free: Vec<BigInt> = generators
            .iter()
            .map(|g| square_free_part(g).expect("generators are positive"))
            .collect();
        let pairwise_distinct = square_free[0] != square_free[1]
            && square_free[0] != square_free[2]
            && square_free[1] != square_free[2];
        Omega1Cert {
            a,
            generators,
            square_free,
            pairwise_distinct,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Omega1Record {
    pub pair: Pair,
    pub cert: Omega1Cert,
    pub class: OmegaClass,
}

/// `Omega^1`: pairs `(nu, u0 - a^2)`, `1 <= a <= nu - 1`, `nu <= max_nu`,
/// that pass the `Omega` checks to `depth`. Sorted by `(nu, x0)`.
pub fn enumerate_omega1(max_nu: u64, depth: usize) -> Result<Vec<Omega1Record>, TowerError> {
    let candidates: Vec<(BigInt, BigInt)> = (2..=max_nu)
        .flat_map(|nu| (1..nu).map(move |a| (BigInt::from(nu), BigInt::from(a))))
        .collect();
    let results: Vec<Result<Option<Omega1Record>, TowerError>> = candidates
        .into_par_iter()
        .map(|(nu, a)| {
            let x0 = &nu * &nu - &nu - &a * &a;
            let pair = Pair::from_big(nu, x0)?;
            let class = classify_pair(&pair, depth)?;
            Ok(class.in_omega().then(|| Omega1Record {
                cert: Omega1Cert::new(&pair, a),
                pair,
                class,
            }))
        })
        .collect();
    let mut out: Vec<Omega1Record> = results
        .into_iter()
        .filter_map(Result::transpose)
        .collect::<Result<_, _>>()?;
    out.sort_by(|x, y| x.pair.cmp(&y.pair));
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SigmaFamily {
    Sigma1,
    Sigma2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SigmaRecord {
    pub family: SigmaFamily,
    pub pair: Pair,
    #[serde(with = "crate::serde_big")]
    pub k: BigInt,
    #[serde(with = "crate::serde_big")]
    pub a: BigInt,
    pub class: OmegaClass,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SigmaEnumeration {
    pub sigma1: Vec<SigmaRecord>,
    pub sigma2: Vec<SigmaRecord>,
    /// Generated by a parametrization but failing the `Omega` checks.
    pub rejected: Vec<SigmaRecord>,
}

/// `k` ranges: `1 <= k <= sqrt(nu - 1)` for `Sigma1` and
/// `sqrt(nu + 1) <= k <= sqrt(2 nu - 1)` for `Sigma2`.
pub fn sigma_k_range(nu: &BigInt, family: SigmaFamily) -> (BigInt, BigInt) {
    let one = BigInt::one();
    match family {
        SigmaFamily::Sigma1 => (one.clone(), (nu - &one).sqrt()),
        SigmaFamily::Sigma2 => {
            let lo = (nu + &one).sqrt();
            let lo = if &lo * &lo == nu + &one { lo } else { lo + 1 };
            (lo, (BigInt::from(2) * nu - &one).sqrt())
        }
    }
}

/// The pair of a `Sigma` parametrization: `(nu, u0 - (nu - k^2)^2)`.
pub fn sigma_pair(nu: &BigInt, k: &BigInt) -> Option<Pair> {
    let a = nu - k * k;
    Pair::from_big(nu.clone(), nu * nu - nu - &a * &a).ok()
}

pub fn enumerate_sigma12(max_nu: u64, depth: usize) -> Result<SigmaEnumeration, TowerError> {
    let mut candidates = Vec::new();
    for nu in 2..=max_nu {
        let nu = BigInt::from(nu);
        for family in [SigmaFamily::Sigma1, SigmaFamily::Sigma2] {
            let (lo, hi) = sigma_k_range(&nu, family);
            let mut k = lo;
            while k <= hi {
                candidates.push((family, nu.clone(), k.clone()));
                k += 1;
            }
        }
    }
    let records: Vec<Result<Option<SigmaRecord>, TowerError>> = candidates
        .into_par_iter()
        .map(|(family, nu, k)| {
            let Some(pair) = sigma_pair(&nu, &k) else {
                return Ok(None);
            };
            let class = classify_pair(&pair, depth)?;
            let a = (&nu - &k * &k).abs();
            Ok(Some(SigmaRecord {
                family,
                pair,
                k,
                a,
                class,
            }))
        })
        .collect();
    let mut out = SigmaEnumeration::default();
    for r in records {
        let Some(r) = r? else { continue };
        if !r.class.in_omega() {
            out.rejected.push(r);
        } else if r.family == SigmaFamily::Sigma1 {
            out.sigma1.push(r);
        } else {
            out.sigma2.push(r);
        }
    }
    for list in [&mut out.sigma1, &mut out.sigma2, &mut out.rejected] {
        list.sort_by(|x, y| (&x.pair, &x.k).cmp(&(&y.pair, &y.k)));
    }
    Ok(out)
}
