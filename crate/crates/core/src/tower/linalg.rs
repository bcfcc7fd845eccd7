use num_traits::{One, Zero};

use super::{Tower, TowerElem, TowerError};
use crate::exact::Rat;

/// Incremental row-echelon basis over `Q` that remembers how each stored
/// row was built from the inserted vectors.
#[derive(Clone, Debug)]
pub struct Span {
    dim: usize,
    rows: Vec<Row>,
}

#[derive(Clone, Debug)]
struct Row {
    pivot: usize,
    vec: Vec<Rat>,
    combo: Vec<Rat>,
}

impl Span {
    pub fn new(dim: usize) -> Self {
        Span {
            dim,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v`; returns the remainder and the combination of accepted
    /// inputs that was subtracted.
    fn reduce(&self, v: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
        assert_eq!(v.len(), self.dim, "dimension mismatch");
        let mut v = v.to_vec();
        let mut combo = vec![Rat::zero(); self.rows.len()];
        for row in &self.rows {
            if v[row.pivot].is_zero() {
                continue;
            }
            let f = &v[row.pivot] / &row.vec[row.pivot];
            for (x, r) in v.iter_mut().zip(&row.vec) {
                if !r.is_zero() {
                    *x -= &f * r;
                }
            }
            for (c, r) in combo.iter_mut().zip(&row.combo) {
                if !r.is_zero() {
                    *c += &f * r;
                }
            }
        }
        (v, combo)
    }

    /// Add `v`; false (and no change) when it is already in the span.
    pub fn insert(&mut self, v: &[Rat]) -> bool {
        let (rem, combo) = self.reduce(v);
        let Some(pivot) = rem.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let mut row_combo: Vec<Rat> = combo.into_iter().map(|c| -c).collect();
        row_combo.push(Rat::one());
        for row in &mut self.rows {
            row.combo.push(Rat::zero());
        }
        self.rows.push(Row {
            pivot,
            vec: rem,
            combo: row_combo,
        });
        true
    }

    /// Coefficients `c` with `v = sum c_j input_j` over the accepted
    /// inputs, in insertion order.
    pub fn solve(&self, v: &[Rat]) -> Option<Vec<Rat>> {
        let (rem, combo) = self.reduce(v);
        if rem.iter().any(|x| !x.is_zero()) {
            return None;
        }
        Some(combo)
    }
}

/// Powers `1, theta, ..., theta^(k-1)` with `k = [Q(theta) : Q]`, as a span.
/// `solve` on the result expresses elements of `Q(theta)` in that basis.
pub fn power_span(tower: &Tower, theta: &TowerElem) -> Result<Span, TowerError> {
    let level = theta.level();
    let mut span = Span::new(1 << level);
    let mut p = TowerElem::one(level);
    while span.insert(&p.flatten()) {
        p = tower.mul(&p, theta)?;
    }
    Ok(span)
}

/// `[Q(theta) : Q]`, the rank of the powers of `theta`.
pub fn degree_over_q(tower: &Tower, theta: &TowerElem) -> Result<usize, TowerError> {
    Ok(power_span(tower, theta)?.rank())
}

/// Coefficients `c` with `target = sum c_i theta^i` (`i < [Q(theta):Q]`),
/// i.e. a certificate that `target` lies in `Q(theta)`.
pub fn express_in_powers(
    tower: &Tower,
    theta: &TowerElem,
    target: &TowerElem,
) -> Result<Option<Vec<Rat>>, TowerError> {
    if theta.level() != target.level() {
        return Err(TowerError::LevelMismatch {
            left: theta.level(),
            right: target.level(),
        });
    }
    Ok(power_span(tower, theta)?.solve(&target.flatten()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::tower::Pair;

    #[test]
    fn span_solves_combinations() {
        let mut s = Span::new(3);
        assert!(s.insert(&[rat(1), rat(2), rat(0)]));
        assert!(s.insert(&[rat(0), rat(1), rat(1)]));
        assert!(!s.insert(&[rat(2), rat(5), rat(1)]));
        assert_eq!(
            s.solve(&[rat(3), rat(7), rat(1)]),
            Some(vec![rat(3), rat(1)])
        );
        assert_eq!(s.solve(&[rat(0), rat(0), rat(1)]), None);
    }

    #[test]
    fn degrees_in_the_21_tower() {
        let t = Tower::for_pair(&Pair::new(2, 1).unwrap(), 3);
        assert_eq!(degree_over_q(&t, &TowerElem::generator(3)).unwrap(), 8);
        assert_eq!(
            degree_over_q(&t, &TowerElem::generator(1).lift(3)).unwrap(),
            2
        );
        assert_eq!(
            degree_over_q(&t, &TowerElem::constant(3, rat(5))).unwrap(),
            1
        );
        // x_1 = x_2^2 - 2 lies in Q(x_2).
        let c = express_in_powers(
            &t,
            &TowerElem::generator(2),
            &TowerElem::generator(1).lift(2),
        )
        .unwrap()
        .unwrap();
        assert_eq!(c, vec![rat(-2), rat(0), rat(1), rat(0)]);
    }
}
