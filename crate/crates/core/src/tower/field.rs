use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Pair, TowerElem, TowerError};
use crate::exact::{rat_int, rat_is_square, Rat};

/// A finite tower of quadratic extensions of `Q`.
///
/// `squares[k]` is the level-`k` element whose square root is the generator
/// of level `k + 1`. For the iterated-root towers `squares[0] = nu + x0` and
/// `squares[k] = nu + g_k`, but any element may be used, which is how formal
/// extensions like `K_n(sqrt d)` are built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tower {
    squares: Vec<TowerElem>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl Default for Tower {
    fn default() -> Self {
        Self::rationals()
    }
}

impl Tower {
    /// Just `Q`.
    pub fn rationals() -> Self {
        Tower {
            squares: Vec::new(),
        }
    }

    /// The tower of `pair` up to `depth`.
    pub fn for_pair(pair: &Pair, depth: usize) -> Self {
        let mut t = Tower::rationals();
        for k in 0..depth {
            let sq = if k == 0 {
                TowerElem::rational(rat_int(&pair.nu_plus_x0()))
            } else {
                TowerElem::constant(k, rat_int(&pair.nu)).add_raw(&TowerElem::generator(k))
            };
            t.squares.push(sq);
        }
        t
    }

    /// Adjoin a square root of `square`, which must live at the top level.
    pub fn extend(&self, square: TowerElem) -> Result<Tower, TowerError> {
        if square.level() != self.depth() {
            return Err(TowerError::LevelMismatch {
                left: square.level(),
                right: self.depth(),
            });
        }
        let mut t = self.clone();
        t.squares.push(square);
        Ok(t)
    }

    /// The first `depth` levels.
    pub fn truncate(&self, depth: usize) -> Tower {
        Tower {
            squares: self.squares[..depth.min(self.depth())].to_vec(),
        }
    }

    pub fn depth(&self) -> usize {
        self.squares.len()
    }

    /// The square of the level-`level` generator (an element one level down).
    pub fn generator_square(&self, level: usize) -> &TowerElem {
        &self.squares[level - 1]
    }

    pub fn generator(&self, level: usize) -> Result<TowerElem, TowerError> {
        self.in_range(level)?;
        if level == 0 {
            return Err(TowerError::LevelZeroNorm);
        }
        Ok(TowerElem::generator(level))
    }

    pub fn constant(&self, level: usize, q: Rat) -> Result<TowerElem, TowerError> {
        self.in_range(level)?;
        Ok(TowerElem::constant(level, q))
    }

    fn in_range(&self, level: usize) -> Result<(), TowerError> {
        if level > self.depth() {
            return Err(TowerError::LevelOutOfRange {
                level,
                depth: self.depth(),
            });
        }
        Ok(())
    }

    fn check2(&self, x: &TowerElem, y: &TowerElem) -> Result<(), TowerError> {
        if x.level() != y.level() {
            return Err(TowerError::LevelMismatch {
                left: x.level(),
                right: y.level(),
            });
        }
        self.in_range(x.level())
    }

    pub fn arith(
        &self,
        op: ArithOp,
        x: &TowerElem,
        y: &TowerElem,
    ) -> Result<TowerElem, TowerError> {
        match op {
            ArithOp::Add => x.add(y),
            ArithOp::Sub => x.sub(y),
            ArithOp::Mul => self.mul(x, y),
            ArithOp::Div => self.div(x, y),
        }
    }

    pub fn mul(&self, x: &TowerElem, y: &TowerElem) -> Result<TowerElem, TowerError> {
        self.check2(x, y)?;
        Ok(self.mul_raw(x, y))
    }

    pub(crate) fn mul_raw(&self, x: &TowerElem, y: &TowerElem) -> TowerElem {
        let (Some((a1, b1)), Some((a2, b2))) = (x.parts(), y.parts()) else {
            let (p, q) = (x.as_base().unwrap(), y.as_base().unwrap());
            return TowerElem::rational(p * q);
        };
        let level = x.level();
        if x.is_zero() || y.is_zero() {
            return TowerElem::zero(level);
        }
        let aa = self.mul_raw(a1, a2);
        match (b1, b2) {
            (None, None) => TowerElem::quad_opt(aa, None),
            (Some(b1), None) => TowerElem::quad_unchecked(aa, self.mul_raw(b1, a2)),
            (None, Some(b2)) => TowerElem::quad_unchecked(aa, self.mul_raw(a1, b2)),
            (Some(b1), Some(b2)) => {
                let bb = self.mul_raw(b1, b2);
                let cross = self
                    .mul_raw(&a1.add_raw(b1), &a2.add_raw(b2))
                    .sub_raw(&aa)
                    .sub_raw(&bb);
                let a = aa.add_raw(&self.mul_raw(&bb, self.generator_square(level)));
                TowerElem::quad_unchecked(a, cross)
            }
        }
    }

    pub fn square(&self, x: &TowerElem) -> Result<TowerElem, TowerError> {
        self.mul(x, x)
    }

    pub fn pow(&self, x: &TowerElem, mut e: u32) -> Result<TowerElem, TowerError> {
        self.in_range(x.level())?;
        let mut base = x.clone();
        let mut acc = TowerElem::one(x.level());
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul_raw(&base, &base);
            }
        }
        Ok(acc)
    }

    /// `(a + b g)(a - b g) = a^2 - b^2 g^2`, one level down.
    pub fn norm_down(&self, x: &TowerElem) -> Result<TowerElem, TowerError> {
        self.in_range(x.level())?;
        let Some((a, b)) = x.parts() else {
            return Err(TowerError::LevelZeroNorm);
        };
        Ok(self.norm_raw(x.level(), a, b))
    }

    fn norm_raw(&self, level: usize, a: &TowerElem, b: Option<&TowerElem>) -> TowerElem {
        let aa = self.mul_raw(a, a);
        match b {
            None => aa,
            Some(b) => {
                let bb = self.mul_raw(b, b);
                aa.sub_raw(&self.mul_raw(&bb, self.generator_square(level)))
            }
        }
    }

    /// Relative norm down to `target` (repeated [`norm_down`](Self::norm_down)).
    pub fn norm_to(&self, x: &TowerElem, target: usize) -> Result<TowerElem, TowerError> {
        if target > x.level() {
            return Err(TowerError::TargetAboveLevel {
                target,
                level: x.level(),
            });
        }
        let mut e = x.clone();
        while e.level() > target {
            e = self.norm_down(&e)?;
        }
        Ok(e)
    }

    /// `(a - b g) / N(x)`; fails on zero (or on a zero divisor when the
    /// tower is not a field).
    pub fn inv(&self, x: &TowerElem) -> Result<TowerElem, TowerError> {
        self.in_range(x.level())?;
        self.inv_raw(x)
    }

    fn inv_raw(&self, x: &TowerElem) -> Result<TowerElem, TowerError> {
        match x.parts() {
            None => {
                let q = x.as_base().unwrap();
                if q.is_zero() {
                    return Err(TowerError::DivisionByZero);
                }
                Ok(TowerElem::rational(q.recip()))
            }
            Some((a, b)) => {
                let n = self.norm_raw(x.level(), a, b);
                let ninv = self.inv_raw(&n)?;
                let new_a = self.mul_raw(a, &ninv);
                let new_b = b.map(|b| self.mul_raw(b, &ninv).neg());
                Ok(TowerElem::quad_opt(new_a, new_b))
            }
        }
    }

    pub fn div(&self, x: &TowerElem, y: &TowerElem) -> Result<TowerElem, TowerError> {
        self.check2(x, y)?;
        let yinv = self.inv_raw(y)?;
        Ok(self.mul_raw(x, &yinv))
    }

    /// A square root of `s` in the tower, if there is one.
    ///
    /// Level 0 is the rational test. For `s = a + b g` with `g^2 = c`: when
    /// `b = 0` the root is `u` with `u^2 = a` or `v g` with `(vc)^2 = ac`;
    /// otherwise `a^2 - b^2 c` must be a square `delta^2` one level down and
    /// `u^2 = (a +- delta)/2`, `v = b/(2u)`.
    pub fn sqrt(&self, s: &TowerElem) -> Result<Option<TowerElem>, TowerError> {
        self.in_range(s.level())?;
        Ok(self.sqrt_raw(s))
    }

    pub fn is_square(&self, s: &TowerElem) -> Result<bool, TowerError> {
        Ok(self.sqrt(s)?.is_some())
    }

    fn sqrt_raw(&self, s: &TowerElem) -> Option<TowerElem> {
        let Some((a, b)) = s.parts() else {
            return rat_is_square(s.as_base().unwrap()).map(TowerElem::rational);
        };
        let c = self.generator_square(s.level());
        match b {
            None => {
                if let Some(u) = self.sqrt_raw(a) {
                    return Some(TowerElem::quad_opt(u, None));
                }
                let t = self.sqrt_raw(&self.mul_raw(a, c))?;
                // (v g)^2 = v^2 c = a with v = t / c.
                let v = self.mul_raw(&t, &self.inv_raw(c).ok()?);
                Some(TowerElem::quad_unchecked(TowerElem::zero(a.level()), v))
            }
            Some(b) => {
                let disc = self.norm_raw(s.level(), a, Some(b));
                let delta = self.sqrt_raw(&disc)?;
                let half = Rat::new(1.into(), 2.into());
                for d in [delta.clone(), delta.neg()] {
                    let u2 = a.add_raw(&d).scale(&half);
                    if u2.is_zero() {
                        continue;
                    }
                    let Some(u) = self.sqrt_raw(&u2) else {
                        continue;
                    };
                    let Ok(uinv) = self.inv_raw(&u) else { continue };
                    let v = self.mul_raw(b, &uinv).scale(&half);
                    return Some(TowerElem::quad_unchecked(u, v));
                }
                None
            }
        }
    }

    /// Numeric values of the generators under the embedding that takes the
    /// positive root at every level; `None` when some radicand is negative.
    pub fn canonical_generators(&self) -> Option<Vec<f64>> {
        let mut vals: Vec<f64> = Vec::with_capacity(self.depth());
        for k in 0..self.depth() {
            let r = eval_f64(&self.squares[k], &vals);
            if r < 0.0 {
                return None;
            }
            vals.push(r.sqrt());
        }
        Some(vals)
    }

    /// Floating-point value under the all-positive embedding.
    pub fn approx(&self, x: &TowerElem) -> Option<f64> {
        let gens = self.canonical_generators()?;
        Some(eval_f64(x, &gens))
    }

    /// Pick the root with positive canonical value (falls back to `w`).
    pub fn positive_root(&self, w: TowerElem) -> TowerElem {
        match self.approx(&w) {
            Some(v) if v < 0.0 => w.neg(),
            _ => w,
        }
    }

    /// Nested-radical text, e.g. `1 + 2*sqrt(2+sqrt(2))`.
    pub fn render(&self, x: &TowerElem) -> String {
        self.render_with(x, " ")
    }

    fn render_with(&self, x: &TowerElem, pad: &str) -> String {
        let coords = x.flatten();
        let mut out = String::new();
        for (mask, c) in coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(pad);
                out.push(if neg { '-' } else { '+' });
                out.push_str(pad);
            }
            let mono: Vec<String> = (0..x.level())
                .filter(|k| mask >> k & 1 == 1)
                .map(|k| format!("sqrt({})", self.render_with(&self.squares[k], "")))
                .collect();
            let coeff = if a.is_integer() {
                a.numer().to_string()
            } else {
                format!("({}/{})", a.numer(), a.denom())
            };
            if mono.is_empty() {
                out.push_str(&coeff);
            } else {
                if !a.is_one() {
                    out.push_str(&coeff);
                    out.push('*');
                }
                out.push_str(&mono.join("*"));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

fn eval_f64(x: &TowerElem, gens: &[f64]) -> f64 {
    match x.parts() {
        None => x.as_base().unwrap().to_f64().unwrap_or(f64::NAN),
        Some((a, b)) => {
            let av = eval_f64(a, gens);
            match b {
                None => av,
                Some(b) => av + eval_f64(b, gens) * gens[x.level() - 1],
            }
        }
    }
}

/// `nu` as an element at `level`.
pub(crate) fn nu_at(nu: &BigInt, level: usize) -> TowerElem {
    TowerElem::constant(level, rat_int(nu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, rat_frac};
    use proptest::prelude::*;

    fn pair(nu: i64, x0: i64) -> Pair {
        Pair::new(nu, x0).unwrap()
    }

    fn elem(level: usize, coords: &[i64]) -> TowerElem {
        let mut c: Vec<Rat> = coords.iter().map(|&v| rat(v)).collect();
        c.resize(1 << level, rat(0));
        TowerElem::from_flat(&c)
    }

    #[test]
    fn difference_of_squares_at_level_one() {
        let t = Tower::for_pair(&pair(2, 0), 1);
        let x = elem(1, &[1, 1]);
        let y = elem(1, &[1, -1]);
        assert_eq!(t.mul(&x, &y).unwrap(), TowerElem::constant(1, rat(-1)));
    }

    #[test]
    fn square_of_one_plus_sqrt3() {
        let t = Tower::for_pair(&pair(2, 1), 1);
        let x = elem(1, &[1, 1]);
        assert_eq!(t.square(&x).unwrap(), elem(1, &[4, 2]));
    }

    #[test]
    fn inverse_of_one_plus_sqrt2() {
        let t = Tower::for_pair(&pair(2, 0), 1);
        let x = elem(1, &[1, 1]);
        let inv = t.inv(&x).unwrap();
        assert_eq!(inv, elem(1, &[-1, 1]));
        assert_eq!(t.mul(&x, &inv).unwrap(), TowerElem::one(1));
        assert_eq!(
            t.div(&x, &TowerElem::zero(1)),
            Err(TowerError::DivisionByZero)
        );
    }

    #[test]
    fn generator_squares_to_radicand() {
        let t = Tower::for_pair(&pair(3, 0), 4);
        for k in 1..=4 {
            let g = TowerElem::generator(k);
            let want = t.generator_square(k).clone().lift(k);
            assert_eq!(t.square(&g).unwrap(), want);
        }
    }

    #[test]
    fn norm_examples() {
        let t = Tower::for_pair(&pair(3, 0), 2);
        let e = TowerElem::constant(1, rat(6))
            .sub(&TowerElem::generator(1))
            .unwrap();
        assert_eq!(t.norm_down(&e).unwrap(), TowerElem::rational(rat(33)));
        let t21 = Tower::for_pair(&pair(2, 1), 1);
        assert_eq!(
            t21.norm_down(&TowerElem::generator(1)).unwrap(),
            TowerElem::rational(rat(-3))
        );
        assert_eq!(
            t.norm_down(&TowerElem::one(0)),
            Err(TowerError::LevelZeroNorm)
        );
        assert!(matches!(
            t.norm_to(&TowerElem::one(1), 2),
            Err(TowerError::TargetAboveLevel { .. })
        ));
    }

    #[test]
    fn square_test_examples() {
        let t = Tower::for_pair(&pair(2, 0), 1);
        let w = t.sqrt(&elem(1, &[3, 2])).unwrap().unwrap();
        assert_eq!(t.positive_root(w), elem(1, &[1, 1]));

        let t21 = Tower::for_pair(&pair(2, 1), 1);
        assert_eq!(t21.sqrt(&elem(1, &[2, -1])).unwrap(), None);

        let t43 = Tower::for_pair(&pair(4, 3), 2);
        let two = TowerElem::constant(2, rat(2));
        let w = t43
            .sqrt(&two)
            .unwrap()
            .expect("sqrt 2 lies in K_2 of (4,3)");
        assert_eq!(t43.square(&w).unwrap(), two);
    }

    #[test]
    fn square_with_zero_top_uses_generator() {
        // 8 = (2 sqrt 2)^2 needs the v*g branch.
        let t = Tower::for_pair(&pair(2, 0), 1);
        let w = t.sqrt(&TowerElem::constant(1, rat(8))).unwrap().unwrap();
        assert_eq!(t.positive_root(w), elem(1, &[0, 2]));
        let w = t
            .sqrt(&TowerElem::constant(1, rat_frac(1, 2)))
            .unwrap()
            .unwrap();
        assert_eq!(
            t.square(&w).unwrap(),
            TowerElem::constant(1, rat_frac(1, 2))
        );
    }

    #[test]
    fn render_nested_radicals() {
        let t = Tower::for_pair(&pair(2, 0), 2);
        let e = elem(2, &[1, 0, 2, 0]);
        assert_eq!(t.render(&e), "1 + 2*sqrt(2+sqrt(2))");
        let e = elem(2, &[0, -1, 0, 3]);
        assert_eq!(t.render(&e), "-sqrt(2) + 3*sqrt(2)*sqrt(2+sqrt(2))");
        assert_eq!(t.render(&TowerElem::zero(2)), "0");
    }

    #[test]
    fn extension_by_negative_square() {
        // Q(sqrt 2)(sqrt(-1)): -1 becomes a square, -2 as well.
        let t = Tower::for_pair(&pair(2, 0), 1)
            .extend(TowerElem::constant(1, rat(-1)))
            .unwrap();
        let m2 = TowerElem::constant(2, rat(-2));
        let w = t.sqrt(&m2).unwrap().unwrap();
        assert_eq!(t.square(&w).unwrap(), m2);
        assert!(t.canonical_generators().is_none());
    }

    fn small_elem(level: usize) -> impl Strategy<Value = TowerElem> {
        proptest::collection::vec(-4i64..=4, 1 << level)
            .prop_map(|c| TowerElem::from_flat(&c.into_iter().map(rat).collect::<Vec<_>>()))
    }

    fn pairs() -> impl Strategy<Value = Pair> {
        prop_oneof![
            Just(pair(2, 0)),
            Just(pair(2, 1)),
            Just(pair(3, 0)),
            Just(pair(4, 3))
        ]
    }

    proptest! {
        #[test]
        fn field_axioms_hold((p, x, y, z) in pairs().prop_flat_map(|p| (Just(p), small_elem(3), small_elem(3), small_elem(3)))) {
            let t = Tower::for_pair(&p, 3);
            let xy = t.mul(&x, &y).unwrap();
            prop_assert_eq!(&xy, &t.mul(&y, &x).unwrap());
            let lhs = t.mul(&x, &y.add(&z).unwrap()).unwrap();
            let rhs = xy.add(&t.mul(&x, &z).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            if !y.is_zero() {
                let q = t.div(&x, &y).unwrap();
                prop_assert_eq!(t.mul(&q, &y).unwrap(), x);
            }
        }

        #[test]
        fn square_test_is_sound_and_finds_squares((p, x, y) in pairs().prop_flat_map(|p| (Just(p), small_elem(3), small_elem(3)))) {
            let t = Tower::for_pair(&p, 3);
            let s = t.square(&x).unwrap();
            let w = t.sqrt(&s).unwrap();
            prop_assert!(w.is_some());
            prop_assert_eq!(t.square(&w.unwrap()).unwrap(), s);
            if let Some(w) = t.sqrt(&y).unwrap() {
                prop_assert_eq!(t.square(&w).unwrap(), y);
            }
        }

        #[test]
        fn norm_obstruction_blocks_squares((p, s) in pairs().prop_flat_map(|p| (Just(p), small_elem(3)))) {
            let t = Tower::for_pair(&p, 3);
            let n = t.norm_down(&s).unwrap();
            if !t.is_square(&n).unwrap() {
                prop_assert!(!t.is_square(&s).unwrap());
            }
        }

        #[test]
        fn norm_to_composes((p, x) in pairs().prop_flat_map(|p| (Just(p), small_elem(3)))) {
            let t = Tower::for_pair(&p, 3);
            for l in 0..=3 {
                let mut e = x.clone();
                for _ in l..3 {
                    e = t.norm_down(&e).unwrap();
                }
                prop_assert_eq!(t.norm_to(&x, l).unwrap(), e);
            }
        }
    }
}
