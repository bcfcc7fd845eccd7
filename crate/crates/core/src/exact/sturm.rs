use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{ExactError, Rat, UPoly};

/// A rational extended by the two infinities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtRat {
    NegInf,
    Finite(Rat),
    PosInf,
}

impl ExtRat {
    fn rank(&self) -> i8 {
        match self {
            ExtRat::NegInf => -1,
            ExtRat::Finite(_) => 0,
            ExtRat::PosInf => 1,
        }
    }
}

impl PartialOrd for ExtRat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtRat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtRat::Finite(a), ExtRat::Finite(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl From<Rat> for ExtRat {
    fn from(q: Rat) -> Self {
        ExtRat::Finite(q)
    }
}

/// Sturm chain of the square-free part of a polynomial, stored as primitive
/// integer polynomials (each a positive multiple of the textbook chain
/// member, so sign sequences are unchanged).
#[derive(Clone, Debug)]
pub struct SturmChain {
    chain: Vec<Vec<BigInt>>,
}

fn int_degree(p: &[BigInt]) -> usize {
    p.len() - 1
}

fn trim(mut p: Vec<BigInt>) -> Vec<BigInt> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn primitive(p: Vec<BigInt>) -> Vec<BigInt> {
    let content = p.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if content.is_zero() || content.is_one() {
        return p;
    }
    p.into_iter().map(|c| c / &content).collect()
}

/// `lc(b)^(deg a - deg b + 1) * a mod b`, all in `Z[X]`.
fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = int_degree(b);
    let lc = &b[db];
    let mut r = a.to_vec();
    let mut steps = int_degree(a) + 1 - db;
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let c = r[dr].clone();
        for x in r.iter_mut() {
            *x *= lc;
        }
        for (j, bj) in b.iter().enumerate() {
            r[dr - db + j] -= &c * bj;
        }
        steps -= 1;
        r = trim(r);
    }
    // Make up the remaining powers of lc so the multiplier is uniform.
    if steps > 0 {
        let m = num_traits::pow(lc.clone(), steps);
        for x in r.iter_mut() {
            *x *= &m;
        }
    }
    r
}

fn sign_at(p: &[BigInt], x: &ExtRat) -> Sign {
    let d = int_degree(p);
    match x {
        ExtRat::PosInf => p[d].sign(),
        ExtRat::NegInf => {
            if d % 2 == 0 {
                p[d].sign()
            } else {
                -p[d].sign()
            }
        }
        ExtRat::Finite(q) => {
            // Homogenized Horner: sum c_i num^i den^(d-i), same sign as P(q).
            // Horner with the i-th step multiplying the new coefficient by den^i.
            let (num, den) = (q.numer(), q.denom());
            let mut acc = BigInt::zero();
            let mut den_pow = BigInt::one();
            for c in p.iter().rev() {
                acc = acc * num + c * &den_pow;
                den_pow *= den;
            }
            acc.sign()
        }
    }
}

impl SturmChain {
    pub fn new(p: &UPoly) -> Result<Self, ExactError> {
        if p.is_zero() {
            return Err(ExactError::ZeroPolynomial);
        }
        let sf = UPoly::new(
            p.square_free()
                .primitive_integer()
                .into_iter()
                .map(Rat::from_integer)
                .collect(),
        );
        let p0 = sf.primitive_integer();
        let mut chain = vec![p0.clone()];
        if int_degree(&p0) == 0 {
            return Ok(SturmChain { chain });
        }
        let p1 = primitive(UPoly::from_bigints(&p0).derivative().primitive_integer());
        chain.push(p1);
        loop {
            let n = chain.len();
            let (a, b) = (&chain[n - 2], &chain[n - 1]);
            if int_degree(b) == 0 {
                break;
            }
            let k = int_degree(a) + 1 - int_degree(b);
            let mut r = pseudo_rem(a, b);
            if r.is_empty() {
                break;
            }
            // -rem(a, b) up to a positive factor.
            let lc_pow_positive = b[int_degree(b)].is_positive() || k % 2 == 0;
            if lc_pow_positive {
                for x in r.iter_mut() {
                    *x = -std::mem::take(x);
                }
            }
            chain.push(primitive(r));
        }
        Ok(SturmChain { chain })
    }

    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    pub fn variations(&self, x: &ExtRat) -> usize {
        let mut count = 0;
        let mut last = Sign::NoSign;
        for p in &self.chain {
            let s = sign_at(p, x);
            if s == Sign::NoSign {
                continue;
            }
            if last != Sign::NoSign && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Distinct real roots in `(lo, hi]`.
    pub fn count(&self, lo: &ExtRat, hi: &ExtRat) -> Result<usize, ExactError> {
        if lo >= hi {
            return Err(ExactError::EmptyInterval);
        }
        Ok(self.variations(lo) - self.variations(hi))
    }

    fn base(&self) -> &[BigInt] {
        &self.chain[0]
    }
}

/// Number of distinct real roots of `p` in `(lo, hi]`.
pub fn sturm_count(p: &UPoly, lo: &ExtRat, hi: &ExtRat) -> Result<usize, ExactError> {
    SturmChain::new(p)?.count(lo, hi)
}

/// Disjoint intervals `(a, b]`, each holding exactly one real root of `p`,
/// refined until `b - a < tol`, in increasing order. A root hit exactly is
/// returned as the degenerate interval `(r, r)`.
pub fn isolate_real_roots(p: &UPoly, tol: &Rat) -> Result<Vec<(Rat, Rat)>, ExactError> {
    let chain = SturmChain::new(p)?;
    let base = chain.base().to_vec();
    if int_degree(&base) == 0 {
        return Ok(Vec::new());
    }
    let lc = Rat::from_integer(base[int_degree(&base)].abs());
    let bound = base
        .iter()
        .map(|c| Rat::from_integer(c.abs()) / &lc)
        .max()
        .unwrap()
        + Rat::one();

    let count = |a: &Rat, b: &Rat| {
        chain.variations(&ExtRat::Finite(a.clone())) - chain.variations(&ExtRat::Finite(b.clone()))
    };
    let two = Rat::from_integer(2.into());

    let mut pending = vec![(-bound.clone(), bound)];
    let mut isolated = Vec::new();
    while let Some((a, b)) = pending.pop() {
        match count(&a, &b) {
            0 => {}
            1 => isolated.push((a, b)),
            _ => {
                let m = (&a + &b) / &two;
                pending.push((a, m.clone()));
                pending.push((m, b));
            }
        }
    }

    let mut out = Vec::with_capacity(isolated.len());
    for (mut a, mut b) in isolated {
        let sign = |x: &Rat| sign_at(&base, &ExtRat::Finite(x.clone()));
        let mut sb = sign(&b);
        if sb == Sign::NoSign {
            out.push((b.clone(), b));
            continue;
        }
        while &b - &a >= *tol {
            let m = (&a + &b) / &two;
            let sm = sign(&m);
            if sm == Sign::NoSign {
                a = m.clone();
                b = m;
                break;
            }
            // Root in (m, b] iff a sign change there (the root is simple),
            // unless a is itself a root outside the interval: fall back to
            // counting in that case.
            let right = if sign(&a) == Sign::NoSign {
                count(&m, &b) == 1
            } else {
                sm != sb
            };
            if right {
                a = m;
            } else {
                b = m;
                sb = sm;
            }
        }
        out.push((a, b));
    }
    out.sort();
    Ok(out)
}
