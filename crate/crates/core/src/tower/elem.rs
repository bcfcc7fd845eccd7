use num_traits::{One, Zero};

use super::TowerError;
use crate::exact::Rat;

/// An element of the level-`n` field of a tower.
///
/// At level 0 this is a rational; at level `n > 0` it is `a + b*g_n` with
/// `a`, `b` at level `n - 1` and `g_n` the level-`n` generator. A zero `b`
/// is stored as `None`, which keeps lifted constants cheap and makes
/// structural equality coincide with field equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TowerElem {
    level: usize,
    node: Node,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Node {
    Base(Rat),
    Quad(Box<TowerElem>, Option<Box<TowerElem>>),
}

impl TowerElem {
    pub fn rational(q: Rat) -> Self {
        TowerElem {
            level: 0,
            node: Node::Base(q),
        }
    }

    /// The rational `q` viewed at `level`.
    pub fn constant(level: usize, q: Rat) -> Self {
        Self::rational(q).lift(level)
    }

    pub fn zero(level: usize) -> Self {
        Self::constant(level, Rat::zero())
    }

    pub fn one(level: usize) -> Self {
        Self::constant(level, Rat::one())
    }

    /// `a + b*g` one level above `a` and `b`.
    pub fn quad(a: TowerElem, b: TowerElem) -> Result<Self, TowerError> {
        if a.level != b.level {
            return Err(TowerError::LevelMismatch {
                left: a.level,
                right: b.level,
            });
        }
        Ok(Self::quad_unchecked(a, b))
    }

    pub(crate) fn quad_unchecked(a: TowerElem, b: TowerElem) -> Self {
        debug_assert_eq!(a.level, b.level);
        let level = a.level + 1;
        let b = if b.is_zero() { None } else { Some(Box::new(b)) };
        TowerElem {
            level,
            node: Node::Quad(Box::new(a), b),
        }
    }

    pub(crate) fn quad_opt(a: TowerElem, b: Option<TowerElem>) -> Self {
        match b {
            Some(b) => Self::quad_unchecked(a, b),
            None => TowerElem {
                level: a.level + 1,
                node: Node::Quad(Box::new(a), None),
            },
        }
    }

    /// `g_level` itself.
    pub fn generator(level: usize) -> Self {
        assert!(level >= 1, "level 0 has no generator");
        Self::quad_unchecked(Self::zero(level - 1), Self::one(level - 1))
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn is_zero(&self) -> bool {
        match &self.node {
            Node::Base(q) => q.is_zero(),
            Node::Quad(a, None) => a.is_zero(),
            Node::Quad(_, Some(_)) => false,
        }
    }

    /// `(a, b)` for `a + b*g_n`; `None` at level 0.
    pub fn parts(&self) -> Option<(&TowerElem, Option<&TowerElem>)> {
        match &self.node {
            Node::Base(_) => None,
            Node::Quad(a, b) => Some((a, b.as_deref())),
        }
    }

    /// Owned `(a, b)` with an explicit zero `b`.
    pub fn split(&self) -> Option<(TowerElem, TowerElem)> {
        self.parts().map(|(a, b)| {
            let b = b.cloned().unwrap_or_else(|| TowerElem::zero(a.level));
            (a.clone(), b)
        })
    }

    pub fn as_base(&self) -> Option<&Rat> {
        match &self.node {
            Node::Base(q) => Some(q),
            Node::Quad(..) => None,
        }
    }

    /// The rational value when the element lies in `Q`.
    pub fn to_rational(&self) -> Option<Rat> {
        match &self.node {
            Node::Base(q) => Some(q.clone()),
            Node::Quad(a, None) => a.to_rational(),
            Node::Quad(_, Some(_)) => None,
        }
    }

    /// The same element one level down, when its top coefficient is zero.
    pub fn descend(&self) -> Option<&TowerElem> {
        match &self.node {
            Node::Quad(a, None) => Some(a),
            _ => None,
        }
    }

    /// The lowest level the element actually lives at.
    pub fn native_level(&self) -> usize {
        let mut e = self;
        while let Some(a) = e.descend() {
            e = a;
        }
        e.level
    }

    pub fn lift(self, level: usize) -> Self {
        assert!(level >= self.level, "cannot lift down");
        let mut e = self;
        while e.level < level {
            e = TowerElem {
                level: e.level + 1,
                node: Node::Quad(Box::new(e), None),
            };
        }
        e
    }

    /// Lower an element to `level` when it lies there.
    pub fn lower(&self, level: usize) -> Option<TowerElem> {
        let mut e = self;
        while e.level > level {
            e = e.descend()?;
        }
        Some(e.clone())
    }

    fn check(&self, other: &Self) -> Result<(), TowerError> {
        if self.level != other.level {
            return Err(TowerError::LevelMismatch {
                left: self.level,
                right: other.level,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, TowerError> {
        self.check(other)?;
        Ok(self.add_raw(other))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, TowerError> {
        self.check(other)?;
        Ok(self.add_raw(&other.neg()))
    }

    pub(crate) fn add_raw(&self, other: &Self) -> Self {
        match (&self.node, &other.node) {
            (Node::Base(p), Node::Base(q)) => Self::rational(p + q),
            (Node::Quad(a1, b1), Node::Quad(a2, b2)) => {
                let a = a1.add_raw(a2);
                let b = match (b1, b2) {
                    (None, None) => None,
                    (Some(b), None) | (None, Some(b)) => Some((**b).clone()),
                    (Some(x), Some(y)) => Some(x.add_raw(y)),
                };
                Self::quad_opt(a, b)
            }
            _ => unreachable!("levels checked by caller"),
        }
    }

    pub(crate) fn sub_raw(&self, other: &Self) -> Self {
        self.add_raw(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rat::one())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.level);
        }
        match &self.node {
            Node::Base(q) => Self::rational(q * c),
            Node::Quad(a, b) => TowerElem {
                level: self.level,
                node: Node::Quad(
                    Box::new(a.scale(c)),
                    b.as_ref().map(|b| Box::new(b.scale(c))),
                ),
            },
        }
    }

    /// Coordinates in the monomial basis: index bit `k - 1` set means the
    /// monomial contains `g_k`. Length `2^level`.
    pub fn flatten(&self) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); 1 << self.level];
        self.flatten_into(&mut out, 0);
        out
    }

    fn flatten_into(&self, out: &mut [Rat], offset: usize) {
        match &self.node {
            Node::Base(q) => out[offset] = q.clone(),
            Node::Quad(a, b) => {
                a.flatten_into(out, offset);
                if let Some(b) = b {
                    b.flatten_into(out, offset + (1 << (self.level - 1)));
                }
            }
        }
    }

    /// Inverse of [`flatten`](Self::flatten); `coords.len()` must be a power of two.
    pub fn from_flat(coords: &[Rat]) -> Self {
        assert!(
            coords.len().is_power_of_two(),
            "coordinate count must be 2^level"
        );
        if coords.len() == 1 {
            return Self::rational(coords[0].clone());
        }
        let half = coords.len() / 2;
        Self::quad_unchecked(
            Self::from_flat(&coords[..half]),
            Self::from_flat(&coords[half..]),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn zero_top_is_normalized() {
        let e = TowerElem::quad(TowerElem::one(1), TowerElem::zero(1)).unwrap();
        assert_eq!(e, TowerElem::one(2));
        assert_eq!(e.native_level(), 0);
        assert_eq!(e.to_rational(), Some(rat(1)));
    }

    #[test]
    fn flatten_round_trips() {
        let coords: Vec<Rat> = (0..8).map(|i| rat(i * i - 3)).collect();
        let e = TowerElem::from_flat(&coords);
        assert_eq!(e.level(), 3);
        assert_eq!(e.flatten(), coords);
    }

    #[test]
    fn level_mismatch_is_rejected() {
        let err = TowerElem::one(1).add(&TowerElem::one(2)).unwrap_err();
        assert_eq!(err, TowerError::LevelMismatch { left: 1, right: 2 });
    }

    #[test]
    fn generator_flattens_to_top_unit_vector() {
        let g = TowerElem::generator(2);
        assert_eq!(g.flatten(), vec![rat(0), rat(0), rat(1), rat(0)]);
    }
}
