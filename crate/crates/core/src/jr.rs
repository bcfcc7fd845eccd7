//! Houses, conjugate intervals and small censuses behind Julia Robinson
//! number estimates for the orders `Z[x_0, x_1, ...]`.

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::exact::{rat, rat_frac, rat_int, Rat};
use crate::omega::{classify_pair, OmegaClass};
use crate::tower::{
    conjugates_numeric, x_conjugates, CertReal, Pair, Precision, TowerError, MAX_DIGITS,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JrError {
    #[error("pair {pair} is not verified in Omega to depth {depth}")]
    NotVerified { pair: Pair, depth: usize },
    #[error(
        "pair {0} is increasing; the shifted-generator family only gives the bound for \
         decreasing towers (try a pair with nu < x0^2 - x0)"
    )]
    Increasing(Pair),
    #[error("threshold t must be positive")]
    BadThreshold,
    #[error("nu must be at least 2")]
    BadNu,
    #[error(transparent)]
    Tower(#[from] TowerError),
}

fn verified_class(pair: &Pair, depth: usize) -> Result<OmegaClass, JrError> {
    let class = classify_pair(pair, depth.max(1))?;
    if !class.in_omega() {
        return Err(JrError::NotVerified {
            pair: pair.clone(),
            depth,
        });
    }
    Ok(class)
}

/// The conjugates of `sum c_i x_n^i`, certified.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjugateSet {
    pub pair: Pair,
    pub level: usize,
    #[serde(with = "crate::serde_big::vec")]
    pub coeffs: Vec<BigInt>,
    pub values: Vec<CertReal>,
    pub min: CertReal,
    pub max: CertReal,
}

impl ConjugateSet {
    pub fn new(
        pair: &Pair,
        level: usize,
        coeffs: &[BigInt],
        precision: Precision,
    ) -> Result<Self, TowerError> {
        let rats: Vec<Rat> = coeffs.iter().map(rat_int).collect();
        let values = conjugates_numeric(pair, level, &rats, precision)?;
        let min = values
            .iter()
            .skip(1)
            .fold(values[0].clone(), |a, v| a.min(v));
        let max = values
            .iter()
            .skip(1)
            .fold(values[0].clone(), |a, v| a.max(v));
        Ok(ConjugateSet {
            pair: pair.clone(),
            level,
            coeffs: coeffs.to_vec(),
            values,
            min,
            max,
        })
    }
}

/// The largest absolute value of a conjugate.
pub fn house(cs: &ConjugateSet) -> CertReal {
    cs.values
        .iter()
        .skip(1)
        .fold(cs.values[0].abs(), |a, v| a.max(&v.abs()))
}

fn alpha_at(nu: &BigInt, bits: u32) -> CertReal {
    let disc = CertReal::from_int(&(BigInt::from(4) * nu + 1), bits);
    let one = CertReal::from_int(&BigInt::from(1), bits);
    let half = CertReal::from_rat(&rat_frac(1, 2), bits);
    one.add(&disc.sqrt().expect("positive")).mul(&half)
}

/// The fixed point `(1 + sqrt(1 + 4 nu)) / 2` of `x -> sqrt(nu + x)`.
pub fn alpha_limit(nu: &BigInt, precision: Precision) -> Result<CertReal, JrError> {
    if *nu < BigInt::from(2) {
        return Err(JrError::BadNu);
    }
    for bits in precision.schedule() {
        let a = alpha_at(nu, bits);
        if a.within_digits(precision.digits) {
            return Ok(a);
        }
    }
    Err(TowerError::PrecisionExhausted { digits: MAX_DIGITS }.into())
}

/// `floor(alpha)`, exactly.
pub fn alpha_floor(nu: &BigInt) -> BigInt {
    let disc: BigInt = BigInt::from(4) * nu + 1;
    (disc.sqrt() + 1) / 2
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrajectoryPoint {
    pub n: usize,
    pub house: CertReal,
    /// `|house - alpha|`.
    pub gap: CertReal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HouseTrajectory {
    pub pair: Pair,
    pub increasing: bool,
    pub alpha: CertReal,
    pub points: Vec<TrajectoryPoint>,
    /// Every step moves strictly in the labeled direction.
    pub monotone: bool,
    /// `gap_{n+1} (2 alpha - 1) < gap_n` wherever `house_n < alpha + 1`.
    pub contraction: bool,
}

impl HouseTrajectory {
    /// Header `n,house,gap`, one row per level.
    pub fn to_csv(&self, digits: u32) -> String {
        let mut out = String::from("n,house,gap\n");
        for p in &self.points {
            let _ = writeln!(
                out,
                "{},{},{}",
                p.n,
                p.house.value_string(digits),
                p.gap.value_string(digits)
            );
        }
        out
    }
}

/// Houses of `x_1..=x_N`, the direction check against the `Omega` label and
/// the contraction of `|house_n - alpha|`.
pub fn house_trajectory(
    pair: &Pair,
    max_n: usize,
    precision: Precision,
) -> Result<HouseTrajectory, JrError> {
    let class = verified_class(pair, max_n)?;
    let increasing = matches!(class, OmegaClass::IncVerified { .. });
    // Sign pattern 0 takes the positive root at every level, so the house of
    // x_n is h_n = sqrt(nu + h_{n-1}) with h_0 = x0.
    let mut found = None;
    for bits in precision.schedule() {
        let nu = CertReal::from_int(&pair.nu, bits);
        let mut h = CertReal::from_int(&pair.x0, bits);
        let mut houses = Vec::with_capacity(max_n);
        for n in 1..=max_n {
            h = nu
                .add(&h)
                .sqrt()
                .ok_or(TowerError::NotTotallyReal { level: n })?;
            houses.push(h.clone());
        }
        if houses.iter().all(|h| h.within_digits(precision.digits)) {
            found = Some((bits, houses));
            break;
        }
    }
    let (bits, houses) = found.ok_or(TowerError::PrecisionExhausted { digits: MAX_DIGITS })?;
    let alpha = alpha_at(&pair.nu, bits);
    let two_alpha_m1 = alpha
        .scale_int(&BigInt::from(2))
        .sub(&CertReal::from_int(&BigInt::from(1), bits));
    let alpha_p1 = alpha.add(&CertReal::from_int(&BigInt::from(1), bits));
    let want = if increasing {
        Ordering::Greater
    } else {
        Ordering::Less
    };
    let monotone = houses
        .windows(2)
        .all(|w| w[1].cmp_cert(&w[0]) == Some(want));
    let gaps: Vec<CertReal> = houses.iter().map(|h| h.sub(&alpha).abs()).collect();
    let contraction = (0..gaps.len().saturating_sub(1)).all(|i| {
        houses[i].cmp_cert(&alpha_p1) != Some(Ordering::Less)
            || gaps[i].sub(&gaps[i + 1].mul(&two_alpha_m1)).sign() == Some(Ordering::Greater)
    });
    let points = houses
        .into_iter()
        .zip(gaps)
        .enumerate()
        .map(|(i, (house, gap))| TrajectoryPoint {
            n: i + 1,
            house,
            gap,
        })
        .collect();
    Ok(HouseTrajectory {
        pair: pair.clone(),
        increasing,
        alpha,
        points,
        monotone,
        contraction,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Census {
    pub pair: Pair,
    pub level: usize,
    pub t: String,
    pub bound: i64,
    pub count: usize,
    /// `(c0, c1)` with every conjugate of `c0 + c1 x_n` in `(0, t)`.
    pub witnesses: Vec<(i64, i64)>,
    /// Could not be separated from the boundary at the precision cap.
    pub undecided: Vec<(i64, i64)>,
}

enum Verdict {
    Inside,
    Outside,
    Undecided,
}

fn judge(c0: i64, c1: i64, xs: &[CertReal], t: &Rat) -> Verdict {
    let bits = xs[0].bits();
    let (a, b) = (CertReal::from_int(&c0.into(), bits), BigInt::from(c1));
    let mut undecided = false;
    for x in xs {
        let v = a.add(&x.scale_int(&b));
        match (v.sign(), v.cmp_rat(t)) {
            (Some(Ordering::Greater), Some(Ordering::Less)) => {}
            (Some(Ordering::Less | Ordering::Equal), _)
            | (_, Some(Ordering::Greater | Ordering::Equal)) => return Verdict::Outside,
            _ => undecided = true,
        }
    }
    if undecided {
        Verdict::Undecided
    } else {
        Verdict::Inside
    }
}

/// Elements `c0 + c1 x_n` with `|c_i| <= bound` whose conjugates all lie in
/// `(0, t)`. Only this degree-one slice of `Z[x_n]` is searched, so the
/// count is a lower bound for the census of `O_t`.
pub fn ot_census(
    pair: &Pair,
    t: &Rat,
    level: usize,
    bound: i64,
    precision: Precision,
) -> Result<Census, JrError> {
    if *t <= rat(0) {
        return Err(JrError::BadThreshold);
    }
    let xs = x_conjugates(pair, level, precision)?;
    let tuples: Vec<(i64, i64)> = (-bound..=bound)
        .flat_map(|c0| (-bound..=bound).map(move |c1| (c0, c1)))
        .collect();
    let verdicts: Vec<((i64, i64), Verdict)> = tuples
        .into_par_iter()
        .map(|(c0, c1)| ((c0, c1), judge(c0, c1, &xs, t)))
        .collect();
    let mut witnesses = Vec::new();
    let mut pending = Vec::new();
    for (c, v) in verdicts {
        match v {
            Verdict::Inside => witnesses.push(c),
            Verdict::Undecided => pending.push(c),
            Verdict::Outside => {}
        }
    }
    // Retry the undecided ones at higher precision.
    let mut digits = precision.digits;
    while !pending.is_empty() && digits < MAX_DIGITS {
        digits = (digits * 2).min(MAX_DIGITS);
        let xs = x_conjugates(pair, level, Precision::new(digits)?)?;
        let mut still = Vec::new();
        for (c0, c1) in pending {
            match judge(c0, c1, &xs, t) {
                Verdict::Inside => witnesses.push((c0, c1)),
                Verdict::Undecided => still.push((c0, c1)),
                Verdict::Outside => {}
            }
        }
        pending = still;
    }
    witnesses.sort();
    Ok(Census {
        pair: pair.clone(),
        level,
        t: t.to_string(),
        bound,
        count: witnesses.len(),
        witnesses,
        undecided: pending,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SupEstimate {
    pub n: usize,
    /// `s + house(x_n)`, the largest conjugate of `s + x_n`.
    pub sup: CertReal,
    /// Smallest conjugate of `s + x_n` certified positive.
    pub positive: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JrReport {
    pub pair: Pair,
    pub alpha: CertReal,
    #[serde(with = "crate::serde_big")]
    pub shift: BigInt,
    pub family: String,
    pub sup_estimates: Vec<SupEstimate>,
    pub strictly_decreasing: bool,
    /// `s + house(x_N)`.
    pub jr_upper: CertReal,
    /// `s + alpha`, the limit of the estimates.
    pub limit: CertReal,
}

/// For a decreasing pair: with `s = floor(alpha) + 1`, the elements
/// `s + x_n` have all conjugates in `(0, s + house(x_n)]` once
/// `house(x_n) < s`, and `s + house(x_N)` decreases to `s + alpha`.
/// This is an upper-bound reproduction, not a decision of the JR number.
pub fn jr_upper_estimate(
    pair: &Pair,
    max_n: usize,
    precision: Precision,
) -> Result<JrReport, JrError> {
    let class = verified_class(pair, max_n)?;
    if !matches!(class, OmegaClass::DecVerified { .. }) {
        return Err(JrError::Increasing(pair.clone()));
    }
    let shift: BigInt = alpha_floor(&pair.nu) + 1;
    let mut sup_estimates = Vec::new();
    for n in 1..=max_n {
        let cs = ConjugateSet::new(pair, n, &[shift.clone(), BigInt::from(1)], precision)?;
        sup_estimates.push(SupEstimate {
            n,
            positive: cs.min.sign() == Some(Ordering::Greater),
            sup: house(&cs),
        });
    }
    let last = sup_estimates.last().expect("max_n >= 1");
    let bits = last.sup.bits();
    let alpha = alpha_at(&pair.nu, bits);
    let limit = CertReal::from_int(&shift, bits).add(&alpha);
    let strictly_decreasing = sup_estimates
        .windows(2)
        .all(|w| w[1].sup.upper() < w[0].sup.lower());
    Ok(JrReport {
        pair: pair.clone(),
        alpha,
        family: format!("{shift} + x_n"),
        shift,
        jr_upper: last.sup.clone(),
        limit,
        strictly_decreasing,
        sup_estimates,
    })
}
