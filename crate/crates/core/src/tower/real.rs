use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::exact::Rat;

/// A real number known to lie in `[lo, hi] * 2^-bits`.
///
/// Every operation rounds outward, so the true value always stays inside.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertReal {
    lo: BigInt,
    hi: BigInt,
    bits: u32,
}

fn floor_div(n: &BigInt, d: &BigInt) -> BigInt {
    n.div_floor(d)
}

fn ceil_div(n: &BigInt, d: &BigInt) -> BigInt {
    -((-n).div_floor(d))
}

impl CertReal {
    pub fn from_rat(q: &Rat, bits: u32) -> Self {
        let scaled = q.numer() << bits;
        CertReal {
            lo: floor_div(&scaled, q.denom()),
            hi: ceil_div(&scaled, q.denom()),
            bits,
        }
    }

    pub fn from_int(n: &BigInt, bits: u32) -> Self {
        let v = n << bits;
        CertReal {
            lo: v.clone(),
            hi: v,
            bits,
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn lower(&self) -> Rat {
        Rat::new(self.lo.clone(), BigInt::one() << self.bits)
    }

    pub fn upper(&self) -> Rat {
        Rat::new(self.hi.clone(), BigInt::one() << self.bits)
    }

    pub fn midpoint(&self) -> Rat {
        Rat::new(&self.lo + &self.hi, BigInt::one() << (self.bits + 1))
    }

    pub fn radius(&self) -> Rat {
        Rat::new(&self.hi - &self.lo, BigInt::one() << (self.bits + 1))
    }

    /// True when the radius is below `10^-digits`.
    pub fn within_digits(&self, digits: u32) -> bool {
        let width = &self.hi - &self.lo;
        width * num_traits::pow(BigInt::from(10), digits as usize)
            < BigInt::one() << (self.bits + 1)
    }

    pub fn to_f64(&self) -> f64 {
        self.midpoint().to_f64().unwrap_or(f64::NAN)
    }

    fn same(&self, other: &Self) {
        assert_eq!(self.bits, other.bits, "mixed precisions");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same(other);
        CertReal {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
            bits: self.bits,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        CertReal {
            lo: -&self.hi,
            hi: -&self.lo,
            bits: self.bits,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.same(other);
        let prods = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let min = prods.iter().min().unwrap();
        let max = prods.iter().max().unwrap();
        let scale = BigInt::one() << self.bits;
        CertReal {
            lo: floor_div(min, &scale),
            hi: ceil_div(max, &scale),
            bits: self.bits,
        }
    }

    pub fn scale_int(&self, c: &BigInt) -> Self {
        let (a, b) = (&self.lo * c, &self.hi * c);
        let (lo, hi) = if c.is_negative() { (b, a) } else { (a, b) };
        CertReal {
            lo,
            hi,
            bits: self.bits,
        }
    }

    /// `None` when the interval reaches below zero.
    pub fn sqrt(&self) -> Option<Self> {
        if self.lo.is_negative() {
            return None;
        }
        let lo = (&self.lo << self.bits).sqrt();
        let hi_sq = &self.hi << self.bits;
        let mut hi = hi_sq.sqrt();
        if &hi * &hi != hi_sq {
            hi += 1;
        }
        Some(CertReal {
            lo,
            hi,
            bits: self.bits,
        })
    }

    pub fn abs(&self) -> Self {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            CertReal {
                lo: BigInt::zero(),
                hi: self.hi.clone().max(-&self.lo),
                bits: self.bits,
            }
        }
    }

    pub fn max(&self, other: &Self) -> Self {
        self.same(other);
        CertReal {
            lo: (&self.lo).max(&other.lo).clone(),
            hi: (&self.hi).max(&other.hi).clone(),
            bits: self.bits,
        }
    }

    pub fn min(&self, other: &Self) -> Self {
        self.same(other);
        CertReal {
            lo: (&self.lo).min(&other.lo).clone(),
            hi: (&self.hi).min(&other.hi).clone(),
            bits: self.bits,
        }
    }

    /// Certified sign: `Some(Greater)` if strictly positive, `Some(Less)` if
    /// strictly negative, `Some(Equal)` for the exact zero, `None` if the
    /// interval straddles zero.
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Certified comparison with a rational.
    pub fn cmp_rat(&self, q: &Rat) -> Option<Ordering> {
        let (lo, hi) = (self.lower(), self.upper());
        if lo > *q {
            Some(Ordering::Greater)
        } else if hi < *q {
            Some(Ordering::Less)
        } else if lo == *q && hi == *q {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Certified comparison of two intervals.
    pub fn cmp_cert(&self, other: &Self) -> Option<Ordering> {
        self.sub(other).sign()
    }

    pub fn contains(&self, q: &Rat) -> bool {
        self.lower() <= *q && *q <= self.upper()
    }

    /// Midpoint truncated to `digits` decimals.
    pub fn value_string(&self, digits: u32) -> String {
        decimal(&self.midpoint(), digits)
    }

    /// Radius rounded up to the form `1e-k`.
    pub fn radius_string(&self) -> String {
        let r = self.radius();
        if r.is_zero() {
            return "0".to_string();
        }
        let mut k: i64 = 0;
        let ten = Rat::from_integer(10.into());
        let mut bound = Rat::one();
        if r > bound {
            while r > bound {
                bound *= &ten;
                k += 1;
            }
            return format!("1e{k}");
        }
        loop {
            let next = &bound / &ten;
            if r > next {
                break;
            }
            bound = next;
            k += 1;
        }
        format!("1e-{k}")
    }
}

/// Decimal expansion of `q` truncated toward zero after `digits` places.
pub fn decimal(q: &Rat, digits: u32) -> String {
    let neg = q.is_negative();
    let a = q.abs();
    let scale = num_traits::pow(BigInt::from(10), digits as usize);
    let scaled = (a.numer() * &scale) / a.denom();
    let int_part = &scaled / &scale;
    let frac = (&scaled % &scale).to_string();
    let mut s = String::new();
    if neg && !scaled.is_zero() {
        s.push('-');
    }
    s.push_str(&int_part.to_string());
    if digits > 0 {
        s.push('.');
        for _ in frac.len()..digits as usize {
            s.push('0');
        }
        s.push_str(&frac);
    }
    s
}

impl Serialize for CertReal {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        // Show as many decimals as the interval supports, capped for
        // readability of very wide intervals.
        let digits = ((self.bits as f64) * std::f64::consts::LOG10_2) as u32;
        let mut st = serializer.serialize_struct("CertReal", 2)?;
        st.serialize_field("value", &self.value_string(digits.min(1000)))?;
        st.serialize_field("radius", &self.radius_string())?;
        st.end()
    }
}
