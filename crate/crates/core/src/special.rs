//! Membership of special elements: `sqrt2`, the element `x^{2,0}_2` (through
//! the parametrized set `X`), and the real cyclotomic numbers
//! `2cos(2pi/m)`, including the classifier of admissible `m`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exact::{factorize, is_perfect_square, rat, rat_int, square_free_part, Rat, UPoly};
use crate::omega::{classify_pair, sigma_k_range, SigmaFamily};
use crate::tower::{Pair, Tower, TowerCtx, TowerElem, TowerError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecialError {
    #[error("pair {pair} is not verified in Omega to depth {depth}")]
    NotVerified { pair: Pair, depth: usize },
    #[error("square-free part of nu + x0 is {sfp}, not 2")]
    HypothesisViolation { sfp: BigInt },
    #[error("modulus must be at least 3, got {0}")]
    BadModulus(u64),
    #[error(transparent)]
    Tower(#[from] TowerError),
}

fn require_omega(pair: &Pair, depth: usize) -> Result<(), SpecialError> {
    if classify_pair(pair, depth)?.in_omega() {
        Ok(())
    } else {
        Err(SpecialError::NotVerified {
            pair: pair.clone(),
            depth,
        })
    }
}

/// Which clause of the `sqrt2` criterion holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "clause")]
pub enum Sqrt2Clause {
    /// The square-free part of `nu + x0` is 2.
    SquareFreePartTwo,
    Sigma1 {
        #[serde(with = "crate::serde_big")]
        k: BigInt,
    },
    Sigma2 {
        #[serde(with = "crate::serde_big")]
        k: BigInt,
    },
}

/// The `Sigma1`/`Sigma2` parameter `k` of a pair, if it has one.
pub fn sigma_membership(pair: &Pair) -> Option<Sqrt2Clause> {
    let a = is_perfect_square(&(pair.u0() - &pair.x0))?;
    let in_range = |k: &BigInt, family| {
        let (lo, hi) = sigma_k_range(&pair.nu, family);
        lo <= *k && *k <= hi
    };
    if let Some(k) = is_perfect_square(&(&pair.nu - &a)) {
        if in_range(&k, SigmaFamily::Sigma1) {
            return Some(Sqrt2Clause::Sigma1 { k });
        }
    }
    if let Some(k) = is_perfect_square(&(&pair.nu + &a)) {
        if in_range(&k, SigmaFamily::Sigma2) {
            return Some(Sqrt2Clause::Sigma2 { k });
        }
    }
    None
}

/// The arithmetic criterion alone: `sqrt2` is in `K` iff the square-free
/// part of `nu + x0` is 2 or the pair lies in `Sigma1` or `Sigma2`.
pub fn sqrt2_criterion(pair: &Pair) -> Result<Option<Sqrt2Clause>, SpecialError> {
    if square_free_part(&pair.nu_plus_x0()).map_err(TowerError::from)? == BigInt::from(2) {
        return Ok(Some(Sqrt2Clause::SquareFreePartTwo));
    }
    Ok(sigma_membership(pair))
}

/// Direct test: is 2 a square in `K_2`?
pub fn sqrt2_direct(pair: &Pair) -> Result<Option<TowerElem>, SpecialError> {
    let t = Tower::for_pair(pair, 2);
    Ok(t.sqrt(&TowerElem::constant(2, rat(2)))?
        .map(|w| t.positive_root(w)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sqrt2Report {
    pub pair: Pair,
    pub in_k: bool,
    pub clause: Option<Sqrt2Clause>,
    /// A square root of 2 in `K_2`, rendered, when the direct test finds one.
    pub witness: Option<String>,
    pub agrees: bool,
}

pub fn sqrt2_in_k(pair: &Pair, depth: usize) -> Result<Sqrt2Report, SpecialError> {
    require_omega(pair, depth.max(2))?;
    let clause = sqrt2_criterion(pair)?;
    let direct = sqrt2_direct(pair)?;
    let t = Tower::for_pair(pair, 2);
    Ok(Sqrt2Report {
        pair: pair.clone(),
        in_k: clause.is_some(),
        agrees: clause.is_some() == direct.is_some(),
        witness: direct.map(|w| t.render(&w)),
        clause,
    })
}

/// A point of the parametrization of `X`:
/// `nu = 2(b^2 + 6bd + 10d^2)`, `x0 = 2 kappa^2 - nu` with
/// `kappa = b^2 + 8bd + 14d^2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct XParam {
    #[serde(with = "crate::serde_big")]
    pub b: BigInt,
    #[serde(with = "crate::serde_big")]
    pub d: BigInt,
    #[serde(with = "crate::serde_big")]
    pub nu: BigInt,
    #[serde(with = "crate::serde_big")]
    pub x0: BigInt,
    /// Signed; `nu + x0 = 2 kappa^2`.
    #[serde(with = "crate::serde_big")]
    pub kappa: BigInt,
}

impl XParam {
    pub fn new(b: BigInt, d: BigInt) -> Self {
        let nu =
            BigInt::from(2) * (&b * &b + BigInt::from(6) * &b * &d + BigInt::from(10) * &d * &d);
        let kappa = &b * &b + BigInt::from(8) * &b * &d + BigInt::from(14) * &d * &d;
        let x0 = BigInt::from(2) * &kappa * &kappa - &nu;
        XParam {
            b,
            d,
            nu,
            x0,
            kappa,
        }
    }

    pub fn from_i64(b: i64, d: i64) -> Self {
        Self::new(b.into(), d.into())
    }

    /// Check in the `(2,0)` tower, with `y = x^{2,0}_2` and `x_1` of the
    /// target tower sent to `kappa * sqrt2`, that `(kappa sqrt2)^2 = nu + x0`
    /// and `(b y + d y^3)^2 = nu + kappa sqrt2`, i.e. `b y + d y^3` is a
    /// square root of `nu + x_1`.
    pub fn identity_holds(&self) -> Result<bool, TowerError> {
        let t = Tower::for_pair(&Pair::new(2, 0).unwrap(), 2);
        let x1 = TowerElem::generator(1).scale(&rat_int(&self.kappa));
        if t.square(&x1)? != TowerElem::constant(1, rat_int(&(&self.nu + &self.x0))) {
            return Ok(false);
        }
        let y = TowerElem::generator(2);
        let y3 = t.pow(&y, 3)?;
        let lhs = y
            .scale(&rat_int(&self.b))
            .add(&y3.scale(&rat_int(&self.d)))?;
        let rhs = TowerElem::constant(2, rat_int(&self.nu)).add(&x1.lift(2))?;
        Ok(t.square(&lhs)? == rhs)
    }
}

/// All `(b, d)` with the parametrization hitting `pair`, normalized so that
/// `d > 0` or `d = 0, b > 0` (the map is even in `(b, d)`), sorted by
/// `(|d|, |b|)`. Complete: `nu / 2 = (b + 3d)^2 + d^2` bounds `|d|` by
/// `sqrt(nu / 2)` and fixes `b` up to sign.
pub fn x_parameters(pair: &Pair) -> Vec<XParam> {
    let two = BigInt::from(2);
    if !(&pair.nu % &two).is_zero() {
        return Vec::new();
    }
    let half = &pair.nu / &two;
    let mut out = Vec::new();
    let mut d = BigInt::zero();
    while &d * &d <= half {
        if let Some(t) = is_perfect_square(&(&half - &d * &d)) {
            let base = BigInt::from(-3) * &d;
            let mut bs = vec![&base + &t];
            if !t.is_zero() {
                bs.push(&base - &t);
            }
            for b in bs {
                if d.is_zero() && !b.is_positive() {
                    continue;
                }
                let p = XParam::new(b, d.clone());
                if p.x0 == pair.x0 {
                    out.push(p);
                }
            }
        }
        d += 1;
    }
    out.sort_by(|p, q| (p.d.abs(), p.b.abs()).cmp(&(q.d.abs(), q.b.abs())));
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct XWitness {
    pub param: XParam,
    pub identity_verified: bool,
    /// Other parameters reaching the same pair.
    pub alternatives: Vec<XParam>,
}

/// Whether `x^{2,0}_2` lies in `K`: for pairs with square-free part of
/// `nu + x0` equal to 2, this holds exactly on the set `X`; returns the
/// smallest witness `(b, d)` with the identity checked in the tower.
pub fn x2_20_in_k(pair: &Pair, depth: usize) -> Result<Option<XWitness>, SpecialError> {
    let sfp = square_free_part(&pair.nu_plus_x0()).map_err(TowerError::from)?;
    if sfp != BigInt::from(2) {
        return Err(SpecialError::HypothesisViolation { sfp });
    }
    require_omega(pair, depth.max(2))?;
    let mut params = x_parameters(pair);
    if params.is_empty() {
        return Ok(None);
    }
    let param = params.remove(0);
    Ok(Some(XWitness {
        identity_verified: param.identity_holds()?,
        param,
        alternatives: params,
    }))
}

pub const FERMAT_PRIMES: [u64; 5] = [3, 5, 17, 257, 65537];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "form")]
pub enum FermatForm {
    /// `2^r p1 p2` with `r <= 2`.
    Form2rP1P2 {
        r: u32,
        p1: u64,
        p2: u64,
    },
    /// `2^r p1` with `r >= 3`.
    Form2rP1 {
        r: u32,
        p1: u64,
    },
    /// `2^r` with `r >= 2`.
    Form2r {
        r: u32,
    },
    NotAdmissible,
}

/// Match `m` against the three admissible forms, `p1 < p2` distinct
/// Fermat primes. Other shapes (including `2^r p1` with `r <= 2`) are
/// `NotAdmissible`.
pub fn fermat_m_classifier(m: u64) -> Result<FermatForm, SpecialError> {
    if m < 3 {
        return Err(SpecialError::BadModulus(m));
    }
    let r = m.trailing_zeros();
    let mut odd = m >> r;
    let mut primes = Vec::new();
    for p in FERMAT_PRIMES {
        if odd % p == 0 {
            odd /= p;
            if odd % p == 0 {
                return Ok(FermatForm::NotAdmissible);
            }
            primes.push(p);
        }
    }
    if odd != 1 {
        return Ok(FermatForm::NotAdmissible);
    }
    Ok(match (primes.as_slice(), r) {
        (&[p1, p2], 0..=2) => FermatForm::Form2rP1P2 { r, p1, p2 },
        (&[p1], 3..) => FermatForm::Form2rP1 { r, p1 },
        (&[], 2..) => FermatForm::Form2r { r },
        _ => FermatForm::NotAdmissible,
    })
}

/// Euler's totient.
pub fn euler_phi(m: u64) -> u64 {
    factorize(&BigInt::from(m))
        .iter()
        .map(|(p, e)| {
            let p = p.to_u64().unwrap();
            (p - 1) * p.pow(e - 1)
        })
        .product()
}

fn divisors(m: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=m.sqrt())
        .filter(|d| m % d == 0)
        .flat_map(|d| [d, m / d])
        .collect();
    out.sort();
    out.dedup();
    out
}

/// `Phi_m` by `X^m - 1 = prod_{d | m} Phi_d`.
pub fn cyclotomic(m: u64) -> UPoly {
    let mut cache = BTreeMap::new();
    cyclotomic_cached(m, &mut cache)
}

fn cyclotomic_cached(m: u64, cache: &mut BTreeMap<u64, UPoly>) -> UPoly {
    if let Some(p) = cache.get(&m) {
        return p.clone();
    }
    let mut num = UPoly::monomial(Rat::one(), m as usize);
    num = &num - &UPoly::constant(Rat::one());
    for d in divisors(m) {
        if d < m {
            let (q, r) = num.div_rem(&cyclotomic_cached(d, cache));
            debug_assert!(r.is_zero());
            num = q;
        }
    }
    cache.insert(m, num.clone());
    num
}

/// Minimal polynomial of `2cos(2pi/m)`: writing the palindromic `Phi_m` as
/// `X^k Psi(X + 1/X)` with `k = phi(m)/2`, this is `Psi`.
pub fn min_poly_2cos(m: u64) -> Result<UPoly, SpecialError> {
    if m < 3 {
        return Err(SpecialError::BadModulus(m));
    }
    let phi = cyclotomic(m);
    let k = phi.degree().unwrap() / 2;
    // D_j(Y) = X^j + X^-j in terms of Y = X + 1/X.
    let y = UPoly::x();
    let mut dickson = vec![UPoly::constant(rat(2)), y.clone()];
    for j in 2..=k {
        let next = &(&y * &dickson[j - 1]) - &dickson[j - 2];
        dickson.push(next);
    }
    let mut psi = UPoly::constant(phi.coeff(k));
    for (j, dj) in dickson.iter().enumerate().take(k + 1).skip(1) {
        psi = &psi + &dj.scale(&phi.coeff(k + j));
    }
    Ok(psi)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycloRow {
    pub n: usize,
    /// `2cos(2pi/2^{n+2})` against `P_n` of `(2,0)`.
    pub m20: u64,
    pub holds20: bool,
    /// `2cos(2pi/(3 * 2^{n+2}))` against `P_{n+1}` of `(2,1)`.
    pub m21: u64,
    pub holds21: bool,
    pub poly20: String,
    pub poly21: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycloReport {
    pub rows: Vec<CycloRow>,
    pub all_passed: bool,
}

/// Exact equalities `minpoly(2cos(2pi/2^{n+2})) = P^{2,0}_n` and
/// `minpoly(2cos(2pi/(3 2^{n+2}))) = P^{2,1}_{n+1}` for `1 <= n <= max_n`.
pub fn verify_cyclotomic_towers(max_n: usize) -> Result<CycloReport, SpecialError> {
    let c20 = TowerCtx::new(Pair::new(2, 0).unwrap(), max_n);
    let c21 = TowerCtx::new(Pair::new(2, 1).unwrap(), max_n + 1);
    let mut rows = Vec::new();
    for n in 1..=max_n {
        let m20 = 1u64 << (n + 2);
        let m21 = 3 * m20;
        let p20 = c20.min_poly(n)?;
        let p21 = c21.min_poly(n + 1)?;
        rows.push(CycloRow {
            n,
            m20,
            holds20: min_poly_2cos(m20)? == *p20,
            m21,
            holds21: min_poly_2cos(m21)? == *p21,
            poly20: p20.to_string(),
            poly21: p21.to_string(),
        });
    }
    Ok(CycloReport {
        all_passed: rows.iter().all(|r| r.holds20 && r.holds21),
        rows,
    })
}

/// An `m` the classifier rejects although `2cos(2pi/m)` lies in one of the
/// cyclotomic towers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FermatDiscrepancy {
    pub m: u64,
    pub form: FermatForm,
    pub tower: Pair,
    pub level: usize,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FermatReport {
    pub rows: Vec<(u64, FermatForm)>,
    pub discrepancies: Vec<FermatDiscrepancy>,
}

/// Exact probe of the quadratic cases (`phi(m) = 4`): the root
/// `(-p + sqrt(p^2 - 4q))/2` of `X^2 + pX + q` lies in a tower iff the
/// discriminant is a square there.
fn quadratic_discrepancies() -> Result<Vec<FermatDiscrepancy>, SpecialError> {
    let mut out = Vec::new();
    for m in 3..=12u64 {
        if euler_phi(m) != 4 {
            continue;
        }
        let form = fermat_m_classifier(m)?;
        if form != FermatForm::NotAdmissible {
            continue;
        }
        let psi = min_poly_2cos(m)?;
        let disc = psi.coeff(1) * psi.coeff(1) - rat(4) * psi.coeff(0);
        for tower_pair in [Pair::new(2, 0).unwrap(), Pair::new(2, 1).unwrap()] {
            let t = Tower::for_pair(&tower_pair, 2);
            let Some(root) = t.sqrt(&TowerElem::constant(2, disc.clone()))? else {
                continue;
            };
            let root = t.positive_root(root);
            let value = TowerElem::constant(2, -psi.coeff(1))
                .add(&root)?
                .scale(&Rat::new(1.into(), 2.into()));
            out.push(FermatDiscrepancy {
                m,
                form,
                tower: tower_pair,
                level: value.native_level(),
                value: t.render(&value),
            });
            break;
        }
    }
    Ok(out)
}

/// Classify each `m` and list the cases where the literal classification
/// disagrees with a direct membership check.
pub fn fermat_report(ms: &[u64]) -> Result<FermatReport, SpecialError> {
    let rows = ms
        .iter()
        .map(|&m| Ok((m, fermat_m_classifier(m)?)))
        .collect::<Result<_, SpecialError>>()?;
    Ok(FermatReport {
        rows,
        discrepancies: quadratic_discrepancies()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(nu: i64, x0: i64) -> Pair {
        Pair::new(nu, x0).unwrap()
    }

    #[test]
    fn sqrt2_examples() {
        let r = sqrt2_in_k(&p(2, 0), 2).unwrap();
        assert!(r.in_k && r.agrees);
        assert_eq!(r.clause, Some(Sqrt2Clause::SquareFreePartTwo));
        let r = sqrt2_in_k(&p(4, 3), 2).unwrap();
        assert_eq!(r.clause, Some(Sqrt2Clause::Sigma1 { k: BigInt::one() }));
        assert!(r.agrees);
        let r = sqrt2_in_k(&p(3, 0), 2).unwrap();
        assert!(!r.in_k && r.agrees && r.witness.is_none());
    }

    #[test]
    fn x_parameter_examples() {
        let w = x2_20_in_k(&p(2, 0), 2).unwrap().unwrap();
        assert_eq!(
            (w.param.b.clone(), w.param.d.clone()),
            (BigInt::one(), BigInt::zero())
        );
        assert!(w.identity_verified);
        let w = x2_20_in_k(&p(20, 372), 3).unwrap().unwrap();
        assert_eq!(
            (w.param.b.clone(), w.param.d.clone()),
            (BigInt::zero(), BigInt::one())
        );
        assert_eq!(w.alternatives.len(), 1);
        assert_eq!(w.alternatives[0].b, BigInt::from(-10));
        assert!(matches!(
            x2_20_in_k(&p(4, 3), 2),
            Err(SpecialError::HypothesisViolation { .. })
        ));
        // nu / 2 = 3 is not a sum of two squares.
        assert_eq!(x2_20_in_k(&p(6, 12), 3).unwrap(), None);
    }

    #[test]
    fn fermat_examples() {
        let f = |m| fermat_m_classifier(m).unwrap();
        assert_eq!(f(60), FermatForm::Form2rP1P2 { r: 2, p1: 3, p2: 5 });
        assert_eq!(f(40), FermatForm::Form2rP1 { r: 3, p1: 5 });
        assert_eq!(f(7), FermatForm::NotAdmissible);
        assert_eq!(f(12), FermatForm::NotAdmissible);
        assert_eq!(f(9), FermatForm::NotAdmissible);
        assert_eq!(f(4), FermatForm::Form2r { r: 2 });
        assert!(matches!(
            fermat_m_classifier(2),
            Err(SpecialError::BadModulus(2))
        ));
    }

    #[test]
    fn twelve_is_the_only_quadratic_discrepancy() {
        let r = fermat_report(&[12, 60]).unwrap();
        assert_eq!(r.discrepancies.len(), 1);
        let d = &r.discrepancies[0];
        assert_eq!(d.m, 12);
        assert_eq!(d.tower, p(2, 1));
        assert_eq!(d.level, 1);
        assert_eq!(d.value, "sqrt(3)");
    }

    #[test]
    fn min_poly_examples() {
        assert_eq!(min_poly_2cos(8).unwrap(), UPoly::from_ints(&[-2, 0, 1]));
        assert_eq!(min_poly_2cos(12).unwrap(), UPoly::from_ints(&[-3, 0, 1]));
        assert_eq!(min_poly_2cos(5).unwrap(), UPoly::from_ints(&[-1, 1, 1]));
        assert_eq!(min_poly_2cos(3).unwrap(), UPoly::from_ints(&[1, 1]));
        assert_eq!(cyclotomic(12), UPoly::from_ints(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn min_poly_degrees() {
        for m in 3..=200 {
            assert_eq!(
                min_poly_2cos(m).unwrap().degree().unwrap() as u64,
                euler_phi(m) / 2,
                "m = {m}"
            );
        }
    }

    // Oracle: the root 2cos(2pi/m) evaluated in floating point.
    #[test]
    fn min_poly_vanishes_numerically() {
        for m in 3..=40u64 {
            let psi = min_poly_2cos(m).unwrap();
            let x = 2.0 * (2.0 * std::f64::consts::PI / m as f64).cos();
            let v: f64 = psi
                .coeffs()
                .iter()
                .rev()
                .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap());
            assert!(v.abs() < 1e-6, "m = {m}: {v}");
        }
    }

    #[test]
    fn cyclotomic_towers() {
        let r = verify_cyclotomic_towers(3).unwrap();
        assert!(r.all_passed);
        assert_eq!(r.rows[0].poly21, "X^4 - 4*X^2 + 1");
        assert_eq!(r.rows[1].poly20, "X^4 - 4*X^2 + 2");
    }

    #[test]
    fn admissible_moduli_have_power_of_two_totient() {
        for m in 3..=5000u64 {
            if fermat_m_classifier(m).unwrap() != FermatForm::NotAdmissible {
                assert!(euler_phi(m).is_power_of_two(), "m = {m}");
            }
        }
    }

    proptest! {
        #[test]
        fn x_identity(b in -5i64..=5, d in -5i64..=5) {
            let x = XParam::from_i64(b, d);
            prop_assume!(!x.kappa.is_zero());
            prop_assert!(x.identity_holds().unwrap());
            prop_assert_eq!(square_free_part(&(&x.nu + &x.x0)).unwrap(), BigInt::from(2));
        }

        #[test]
        fn x_parameters_recover_the_pair(b in -6i64..=6, d in -6i64..=6) {
            let x = XParam::from_i64(b, d);
            prop_assume!(!x.kappa.is_zero() && !x.x0.is_negative());
            let pair = Pair::from_big(x.nu.clone(), x.x0.clone()).unwrap();
            let found = x_parameters(&pair);
            let (nb, nd) = if d < 0 || (d == 0 && b < 0) { (-b, -d) } else { (b, d) };
            prop_assert!(found.iter().any(|q| q.b == BigInt::from(nb) && q.d == BigInt::from(nd)));
        }
    }
}
