use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{ExactError, Rat};

/// Trial division stops here; larger cofactors go to Pollard rho.
pub const DEFAULT_TRIAL_BOUND: u64 = 1_000_000;

/// Floor square root together with an exactness flag.
pub fn isqrt(n: &BigInt) -> Result<(BigInt, bool), ExactError> {
    if n.is_negative() {
        return Err(ExactError::NegativeSqrt(n.clone()));
    }
    let r = n.sqrt();
    let exact = &r * &r == *n;
    Ok((r, exact))
}

// Quadratic residues mod 64, 63, 65 and 11 reject almost every non-square
// before we pay for a full square root of a huge integer.
fn residue_filter(n: &BigInt) -> bool {
    const MODS: [u32; 4] = [64, 63, 65, 11];
    for m in MODS {
        let r = (n % BigInt::from(m)).to_u32().unwrap_or(0);
        let mut ok = false;
        for x in 0..m {
            if (x * x) % m == r {
                ok = true;
                break;
            }
        }
        if !ok {
            return false;
        }
    }
    true
}

/// Non-negative square root of `n` when `n` is a perfect square.
pub fn is_perfect_square(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    if n.is_zero() {
        return Some(BigInt::zero());
    }
    if !residue_filter(n) {
        return None;
    }
    let (r, exact) = isqrt(n).ok()?;
    exact.then_some(r)
}

/// Returns `w >= 0` with `w^2 = q` when `q` is the square of a rational.
pub fn rat_is_square(q: &Rat) -> Option<Rat> {
    let num = is_perfect_square(q.numer())?;
    let den = is_perfect_square(q.denom())?;
    Some(Rat::new(num, den))
}

/// The square-free `s` with `n = s * m^2` and `sign(s) = sign(n)`.
pub fn square_free_part(n: &BigInt) -> Result<BigInt, ExactError> {
    square_free_part_with(n, DEFAULT_TRIAL_BOUND)
}

pub fn square_free_part_with(n: &BigInt, trial_bound: u64) -> Result<BigInt, ExactError> {
    if n.is_zero() {
        return Err(ExactError::ZeroSquareFree);
    }
    let mut s = BigInt::one();
    for (p, e) in factorize_with(&n.abs(), trial_bound) {
        if e % 2 == 1 {
            s *= p;
        }
    }
    if n.sign() == Sign::Minus {
        s = -s;
    }
    Ok(s)
}

/// Prime factorization of `|n|` (with `n != 0`), sorted by prime.
pub fn factorize(n: &BigInt) -> Vec<(BigInt, u32)> {
    factorize_with(&n.abs(), DEFAULT_TRIAL_BOUND)
}

fn factorize_with(n: &BigInt, trial_bound: u64) -> Vec<(BigInt, u32)> {
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    let mut rest = n.clone();
    if rest.is_zero() {
        return out;
    }
    let push = |p: BigInt, out: &mut Vec<(BigInt, u32)>| {
        if let Some(entry) = out.iter_mut().find(|(q, _)| *q == p) {
            entry.1 += 1;
        } else {
            out.push((p, 1));
        }
    };

    let mut d: u64 = 2;
    while d <= trial_bound {
        let bd = BigInt::from(d);
        if &bd * &bd > rest {
            break;
        }
        while (&rest % &bd).is_zero() {
            rest /= &bd;
            push(bd.clone(), &mut out);
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if !rest.is_one() {
        let mut stack = vec![rest];
        while let Some(m) = stack.pop() {
            if m.is_one() {
                continue;
            }
            if is_probable_prime(&m) {
                push(m, &mut out);
                continue;
            }
            if let Some(r) = is_perfect_square(&m) {
                stack.push(r.clone());
                stack.push(r);
                continue;
            }
            let f = pollard_rho(&m);
            stack.push(&m / &f);
            stack.push(f);
        }
    }
    out.sort();
    out
}

const SMALL_PRIMES: [u32; 20] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
];

/// Miller-Rabin with the first twenty prime bases; deterministic far beyond
/// the sizes this crate factors.
fn is_probable_prime(n: &BigInt) -> bool {
    if *n < BigInt::from(2) {
        return false;
    }
    for p in SMALL_PRIMES {
        let bp = BigInt::from(p);
        if *n == bp {
            return true;
        }
        if (n % &bp).is_zero() {
            return false;
        }
    }
    let one = BigInt::one();
    let n1 = n - &one;
    let mut d = n1.clone();
    let mut s = 0u32;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    'bases: for p in SMALL_PRIMES {
        let mut x = BigInt::from(p).modpow(&d, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Brent's variant of Pollard rho. `n` must be odd, composite and not a
/// perfect square.
fn pollard_rho(n: &BigInt) -> BigInt {
    if n.is_even() {
        return BigInt::from(2);
    }
    let mut c = BigInt::one();
    loop {
        let f = |x: &BigInt| (x * x + &c) % n;
        let mut y = BigInt::from(2);
        let mut r: u64 = 1;
        let mut q = BigInt::one();
        let mut g = BigInt::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..(r - k).min(128) {
                    y = f(&y);
                    q = (q * (&x - &y).abs()) % n;
                }
                g = q.gcd(n);
                k += 128;
            }
            r *= 2;
        }
        if g == *n {
            loop {
                ys = f(&ys);
                g = (&x - &ys).abs().gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if g != *n {
            return g;
        }
        c += 1;
    }
}
