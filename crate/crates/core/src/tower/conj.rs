use std::cmp::Ordering;

use super::{CertReal, Pair, TowerElem, TowerError};
use crate::exact::{rat_int, sturm_count, ExtRat, Rat, UPoly};

pub const DEFAULT_DIGITS: u32 = 40;
pub const MAX_DIGITS: u32 = 256;
/// Exact Sturm cross-checks of total reality stop at this level (degree 64).
pub const STURM_MAX_LEVEL: usize = 6;

/// Requested number of correct decimal digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Precision {
    pub digits: u32,
}

impl Default for Precision {
    fn default() -> Self {
        Precision {
            digits: DEFAULT_DIGITS,
        }
    }
}

impl Precision {
    pub fn new(digits: u32) -> Result<Self, TowerError> {
        if digits == 0 || digits > MAX_DIGITS {
            return Err(TowerError::PrecisionExhausted { digits });
        }
        Ok(Precision { digits })
    }

    /// Working bits for `digits` decimals plus guard bits.
    pub fn bits(self) -> u32 {
        bits_for(self.digits)
    }

    /// Working precisions to try, doubling up to the digit cap.
    pub fn schedule(self) -> Vec<u32> {
        let cap = bits_for(MAX_DIGITS.max(self.digits));
        let mut out = vec![self.bits()];
        while *out.last().unwrap() < cap {
            out.push((out.last().unwrap() * 2).min(cap));
        }
        out
    }
}

fn bits_for(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 32
}

enum Failure {
    /// Some conjugate of `nu + x_{level-1}` is certainly negative.
    Negative(usize),
    Undecided,
}

/// All conjugates of `x_0..x_n` at a fixed working precision. Entry `k`
/// has `2^k` values; index bit `j - 1` set means the negative root was
/// taken at level `j`.
fn levels(pair: &Pair, n: usize, bits: u32) -> Result<Vec<Vec<CertReal>>, Failure> {
    let nu = CertReal::from_int(&pair.nu, bits);
    let mut out = vec![vec![CertReal::from_int(&pair.x0, bits)]];
    for k in 1..=n {
        let prev = &out[k - 1];
        let mut pos = Vec::with_capacity(prev.len());
        for v in prev {
            let r = nu.add(v);
            match r.sign() {
                Some(Ordering::Less) => return Err(Failure::Negative(k)),
                None => return Err(Failure::Undecided),
                _ => {}
            }
            pos.push(r.sqrt().expect("radicand certified nonnegative"));
        }
        let neg: Vec<CertReal> = pos.iter().map(CertReal::neg).collect();
        pos.extend(neg);
        out.push(pos);
    }
    Ok(out)
}

fn levels_escalating(
    pair: &Pair,
    n: usize,
    precision: Precision,
    accept: impl Fn(&[Vec<CertReal>]) -> bool,
) -> Result<Vec<Vec<CertReal>>, TowerError> {
    for bits in precision.schedule() {
        match levels(pair, n, bits) {
            Ok(ls) if accept(&ls) => return Ok(ls),
            Ok(_) | Err(Failure::Undecided) => continue,
            Err(Failure::Negative(level)) => return Err(TowerError::NotTotallyReal { level }),
        }
    }
    Err(TowerError::PrecisionExhausted {
        digits: MAX_DIGITS.max(precision.digits),
    })
}

/// First level `k <= depth` at which some conjugate of `nu + x_{k-1}` is
/// negative (so `K_k` is not totally real), certified by interval
/// arithmetic; `None` when the tower is totally real through `depth`.
pub fn first_non_real_level(
    pair: &Pair,
    depth: usize,
    precision: Precision,
) -> Result<Option<usize>, TowerError> {
    match levels_escalating(pair, depth, precision, |_| true) {
        Ok(_) => Ok(None),
        Err(TowerError::NotTotallyReal { level }) => Ok(Some(level)),
        Err(e) => Err(e),
    }
}

/// Certified conjugates of `x_n` in sign-pattern order.
pub fn x_conjugates(
    pair: &Pair,
    n: usize,
    precision: Precision,
) -> Result<Vec<CertReal>, TowerError> {
    let ls = levels_escalating(pair, n, precision, |ls| {
        ls[n].iter().all(|v| v.within_digits(precision.digits))
    })?;
    Ok(ls.into_iter().nth(n).unwrap())
}

fn sturm_precheck(pair: &Pair, n: usize) -> Result<(), TowerError> {
    if n > STURM_MAX_LEVEL {
        return Ok(());
    }
    let mut p = UPoly::new(vec![-rat_int(&pair.x0), Rat::from_integer(1.into())]);
    for _ in 0..n {
        p = p.step(&pair.nu);
    }
    let roots = sturm_count(&p, &ExtRat::NegInf, &ExtRat::PosInf)?;
    if roots != 1 << n {
        return Err(TowerError::NotTotallyReal { level: n });
    }
    Ok(())
}

fn horner(coeffs: &[Rat], x: &CertReal) -> CertReal {
    let bits = x.bits();
    coeffs
        .iter()
        .rev()
        .fold(CertReal::from_int(&0.into(), bits), |acc, c| {
            acc.mul(x).add(&CertReal::from_rat(c, bits))
        })
}

/// Values of `sum c_i x_n^i` at all `2^n` conjugates of `x_n`, each with
/// radius below `10^-digits`. Total reality is checked first (exactly by a
/// Sturm count for `n <= 6`, by certified radicand signs beyond).
pub fn conjugates_numeric(
    pair: &Pair,
    n: usize,
    coeffs: &[Rat],
    precision: Precision,
) -> Result<Vec<CertReal>, TowerError> {
    let max = 1usize << n;
    if coeffs.len() > max {
        return Err(TowerError::TooManyCoefficients {
            given: coeffs.len(),
            level: n,
            max,
        });
    }
    sturm_precheck(pair, n)?;
    for bits in precision.schedule() {
        let ls = match levels(pair, n, bits) {
            Ok(ls) => ls,
            Err(Failure::Undecided) => continue,
            Err(Failure::Negative(_)) => {
                return Err(TowerError::CertificationMismatch { level: n })
            }
        };
        let vals: Vec<CertReal> = ls[n].iter().map(|x| horner(coeffs, x)).collect();
        if vals.iter().all(|v| v.within_digits(precision.digits)) {
            return Ok(vals);
        }
    }
    Err(TowerError::PrecisionExhausted {
        digits: MAX_DIGITS.max(precision.digits),
    })
}

fn eval_at(e: &TowerElem, pattern: usize, ls: &[Vec<CertReal>], bits: u32) -> CertReal {
    match e.parts() {
        None => CertReal::from_rat(e.as_base().unwrap(), bits),
        Some((a, b)) => {
            let av = eval_at(a, pattern, ls, bits);
            match b {
                None => av,
                Some(b) => {
                    let k = e.level();
                    let g = &ls[k][pattern & ((1 << k) - 1)];
                    av.add(&eval_at(b, pattern, ls, bits).mul(g))
                }
            }
        }
    }
}

/// Conjugates of an arbitrary element of `K_n` for the tower of `pair`.
pub fn elem_conjugates(
    pair: &Pair,
    e: &TowerElem,
    precision: Precision,
) -> Result<Vec<CertReal>, TowerError> {
    let n = e.level();
    sturm_precheck(pair, n)?;
    for bits in precision.schedule() {
        let ls = match levels(pair, n, bits) {
            Ok(ls) => ls,
            Err(Failure::Undecided) => continue,
            Err(Failure::Negative(_)) => {
                return Err(TowerError::CertificationMismatch { level: n })
            }
        };
        let vals: Vec<CertReal> = (0..1usize << n).map(|p| eval_at(e, p, &ls, bits)).collect();
        if vals.iter().all(|v| v.within_digits(precision.digits)) {
            return Ok(vals);
        }
    }
    Err(TowerError::PrecisionExhausted {
        digits: MAX_DIGITS.max(precision.digits),
    })
}
