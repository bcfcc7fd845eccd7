//! Subfield lattices of the towers: the plain chain for thin towers, the
//! chain with two extra quadratic fields under `K_2` for `Omega^1` pairs
//! with `nu >= 3`, and the three-column lattice of `K^{2,1}` built from
//! `K^{2,0}_n`, `M_n = Q(sqrt3 * x^{2,0}_n)` and `K^{2,1}_n`.

use std::fmt::Write as _;

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::exact::{rat, rat_int, square_free_part, Rat};
use crate::galois::omega1_a;
use crate::omega::{classify_pair, is_thin, OmegaClass};
use crate::tower::{power_span, Pair, Span, Tower, TowerElem, TowerError};

/// Largest depth for the `K^{2,1}` lattice (ambient degree `2^6`).
pub const MAX_21_DEPTH: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("pair {pair} is not verified in Omega to depth {depth}: {status}")]
    NotVerified {
        pair: Pair,
        depth: usize,
        status: &'static str,
    },
    #[error("pair {0} has u0 - x0 a square outside 1 <= a <= nu - 1")]
    UnexpectedShape(Pair),
    #[error("depth {depth} is not supported (largest allowed is {max})")]
    BadDepth { depth: usize, max: usize },
    #[error("{what} at level {level}")]
    Certification { what: &'static str, level: usize },
    #[error(transparent)]
    Tower(#[from] TowerError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeNode {
    pub label: String,
    pub degree: usize,
    pub generator: String,
}

/// How an inclusion `A -> B` was certified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EdgeCert {
    /// `x_k = x_{k+1}^2 - nu`, checked in the tower.
    GeneratorRelation,
    /// A square root of `D` found in `B` (rendered).
    SquareWitness(String),
    /// The generator of `A` as a polynomial in the generator of `B`.
    Membership(Vec<Rat>),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LatticeGraph {
    pub nodes: Vec<LatticeNode>,
    /// `(subfield, superfield)` indices, each of relative degree 2.
    pub edges: Vec<(usize, usize)>,
    #[serde(skip)]
    pub certs: Vec<EdgeCert>,
}

impl LatticeGraph {
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.label == label)
    }

    pub fn has_edge(&self, from: &str, to: &str) -> bool {
        match (self.index_of(from), self.index_of(to)) {
            (Some(a), Some(b)) => self.edges.contains(&(a, b)),
            _ => false,
        }
    }

    /// Sort nodes by degree then label and remap the edges.
    fn normalize(&mut self) {
        let mut order: Vec<usize> = (0..self.nodes.len()).collect();
        order.sort_by(|&a, &b| {
            let (x, y) = (&self.nodes[a], &self.nodes[b]);
            (x.degree, &x.label).cmp(&(y.degree, &y.label))
        });
        let mut new_index = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new;
        }
        self.nodes = order.iter().map(|&i| self.nodes[i].clone()).collect();
        let mut edges: Vec<((usize, usize), EdgeCert)> = self
            .edges
            .iter()
            .zip(self.certs.drain(..))
            .map(|(&(a, b), c)| ((new_index[a], new_index[b]), c))
            .collect();
        edges.sort_by_key(|e| e.0);
        self.edges = edges.iter().map(|e| e.0).collect();
        self.certs = edges.into_iter().map(|e| e.1).collect();
    }

    fn push_edge(&mut self, a: usize, b: usize, cert: EdgeCert) {
        self.edges.push((a, b));
        self.certs.push(cert);
    }
}

fn node(label: impl Into<String>, degree: usize, generator: impl Into<String>) -> LatticeNode {
    LatticeNode {
        label: label.into(),
        degree,
        generator: generator.into(),
    }
}

fn require_omega(pair: &Pair, depth: usize) -> Result<(), LatticeError> {
    let class = classify_pair(pair, depth)?;
    if class.in_omega() {
        Ok(())
    } else {
        Err(LatticeError::NotVerified {
            pair: pair.clone(),
            depth,
            status: reason_name(&class),
        })
    }
}

fn reason_name(class: &OmegaClass) -> &'static str {
    match class {
        OmegaClass::NotInOmegaAtDepth { reason, .. } => match reason {
            crate::omega::FailReason::DegreeCollapse => "degree collapse",
            crate::omega::FailReason::NotTotallyReal => "not totally real",
            crate::omega::FailReason::OutsideInequalityRegions => "outside the inequality regions",
        },
        _ => "verified",
    }
}

/// A quadratic subfield `Q(sqrt D)` with a square root of `D` in `K_2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuadSubfield {
    #[serde(with = "crate::serde_big")]
    pub d: BigInt,
    pub witness: String,
    #[serde(skip)]
    pub root: TowerElem,
}

/// The quadratic subfields of `K`: `Q(sqrt(nu + x0))` alone when the tower
/// is thin, plus `Q(sqrt(2(nu - a)))` and `Q(sqrt(2(nu + a)))` for
/// `Omega^1` pairs. Each `D` is checked to be a square in `K_2`.
pub fn quadratic_subfields(pair: &Pair, depth: usize) -> Result<Vec<QuadSubfield>, LatticeError> {
    let depth = depth.max(2);
    require_omega(pair, depth)?;
    let mut radicands = vec![pair.nu_plus_x0()];
    if !is_thin(pair).thin {
        let a = omega1_a(pair).ok_or_else(|| LatticeError::UnexpectedShape(pair.clone()))?;
        let two = BigInt::from(2);
        radicands.push(&two * (&pair.nu - &a));
        radicands.push(&two * (&pair.nu + &a));
    }
    let tower = Tower::for_pair(pair, 2);
    let mut out: Vec<QuadSubfield> = Vec::new();
    for r in radicands {
        let d = square_free_part(&r).map_err(TowerError::from)?;
        let root = tower.sqrt(&TowerElem::constant(2, rat_int(&d)))?.ok_or(
            LatticeError::Certification {
                what: "quadratic radicand is not a square",
                level: 2,
            },
        )?;
        let root = tower.positive_root(root);
        if out.iter().any(|q| q.d == d) {
            return Err(LatticeError::Certification {
                what: "quadratic subfields coincide",
                level: 2,
            });
        }
        out.push(QuadSubfield {
            witness: tower.render(&root),
            d,
            root,
        });
    }
    Ok(out)
}

fn chain(pair: &Pair, depth: usize, tower: &Tower) -> Result<LatticeGraph, LatticeError> {
    let mut g = LatticeGraph::default();
    g.nodes.push(node("Q", 1, "1"));
    for k in 1..=depth {
        g.nodes
            .push(node(format!("K_{k}"), 1 << k, format!("x_{k}")));
    }
    let nu = rat_int(&pair.nu);
    for k in 1..=depth {
        if k > 1 {
            // x_{k-1} = x_k^2 - nu
            let xk = TowerElem::generator(k);
            let lhs = tower
                .square(&xk)?
                .sub(&TowerElem::constant(k, nu.clone()))?;
            if lhs != TowerElem::generator(k - 1).lift(k) {
                return Err(LatticeError::Certification {
                    what: "generator relation fails",
                    level: k,
                });
            }
        }
        g.push_edge(k - 1, k, EdgeCert::GeneratorRelation);
    }
    Ok(g)
}

/// The lattice of subfields of `K_depth`.
///
/// Thin towers give the chain `Q < K_1 < ... < K_d`; `Omega^1` pairs with
/// `nu >= 3` add the two quadratic fields under `K_2`; `(2,1)` gives the
/// three-column lattice, with edges found by exact membership tests.
pub fn build_lattice(pair: &Pair, depth: usize) -> Result<LatticeGraph, LatticeError> {
    if *pair == Pair::new(2, 1).unwrap() {
        return lattice_21(depth);
    }
    require_omega(pair, depth)?;
    let tower = Tower::for_pair(pair, depth);
    let mut g = chain(pair, depth, &tower)?;
    if !is_thin(pair).thin && depth >= 2 {
        let quads = quadratic_subfields(pair, depth)?;
        let k2 = g.index_of("K_2").expect("chain has K_2");
        for q in &quads[1..] {
            let idx = g.nodes.len();
            g.nodes.push(node(
                format!("Q(sqrt({}))", q.d),
                2,
                format!("sqrt({})", q.d),
            ));
            g.push_edge(0, idx, EdgeCert::Membership(vec![rat(1)]));
            g.push_edge(idx, k2, EdgeCert::SquareWitness(q.witness.clone()));
        }
    }
    g.normalize();
    Ok(g)
}

/// Images of `x^{source}_0..=m` in `tower`, choosing at each level a square
/// root of `nu_s + image_{k-1}` and backtracking over the sign choices.
/// Returns the longest chain found (its length minus one is the deepest
/// level reached).
fn embed_images(tower: &Tower, source: &Pair, m: usize) -> Result<Vec<TowerElem>, TowerError> {
    let top = tower.depth();
    let start = TowerElem::constant(top, rat_int(&source.x0));
    let nu = TowerElem::constant(top, rat_int(&source.nu));
    let mut best = vec![start.clone()];
    let mut path = vec![start];
    search(tower, &nu, m, &mut path, &mut best)?;
    Ok(best)
}

fn search(
    tower: &Tower,
    nu: &TowerElem,
    m: usize,
    path: &mut Vec<TowerElem>,
    best: &mut Vec<TowerElem>,
) -> Result<bool, TowerError> {
    if path.len() > best.len() {
        *best = path.clone();
    }
    if path.len() > m {
        return Ok(true);
    }
    let radicand = nu.add(path.last().unwrap())?;
    let Some(w) = tower.sqrt(&radicand)? else {
        return Ok(false);
    };
    let w = tower.positive_root(w);
    for cand in [w.clone(), w.neg()] {
        path.push(cand);
        let done = search(tower, nu, m, path, best)?;
        path.pop();
        if done {
            return Ok(true);
        }
        if w.is_zero() {
            break;
        }
    }
    Ok(false)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EmbedLevel {
    pub level: usize,
    pub found: bool,
    pub image: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EmbedReport {
    pub source: Pair,
    pub target: Pair,
    pub target_depth: usize,
    pub levels: Vec<EmbedLevel>,
    /// First source level with no image inside `K^{target}_{target_depth}`.
    pub first_failure: Option<usize>,
}

/// Try to map `x^{source}_1..=m` into `K^{target}_d` by iterated square-root
/// extraction. A failure only means "not inside the target to depth d".
pub fn embed_chain(
    source: &Pair,
    target: &Pair,
    m: usize,
    d: usize,
) -> Result<EmbedReport, LatticeError> {
    require_omega(source, m.max(1))?;
    require_omega(target, d.max(1))?;
    let tower = Tower::for_pair(target, d);
    let images = embed_images(&tower, source, m)?;
    let levels = (1..=m)
        .map(|k| EmbedLevel {
            level: k,
            found: k < images.len(),
            image: images.get(k).map(|e| tower.render(e)),
        })
        .collect();
    Ok(EmbedReport {
        source: source.clone(),
        target: target.clone(),
        target_depth: d,
        levels,
        first_failure: (images.len() <= m).then_some(images.len()),
    })
}

/// Generators of the `K^{2,1}` lattice nodes inside `K^{2,1}_ambient`.
struct Ambient21 {
    tower: Tower,
    /// Images of `x^{2,0}_k`, `k = 0..`.
    x20: Vec<TowerElem>,
    sqrt3: TowerElem,
}

impl Ambient21 {
    fn new(level: usize, x20_levels: usize) -> Result<Self, LatticeError> {
        let tower = Tower::for_pair(&Pair::new(2, 1).unwrap(), level);
        let x20 = embed_images(&tower, &Pair::new(2, 0).unwrap(), x20_levels)?;
        if x20.len() <= x20_levels {
            return Err(LatticeError::Certification {
                what: "x^{2,0} has no image in K^{2,1}",
                level: x20.len(),
            });
        }
        let sqrt3 = TowerElem::generator(1).lift(level);
        Ok(Ambient21 { tower, x20, sqrt3 })
    }

    fn x21(&self, k: usize) -> TowerElem {
        TowerElem::generator(k).lift(self.tower.depth())
    }

    fn m(&self, k: usize) -> Result<TowerElem, TowerError> {
        self.tower.mul(&self.sqrt3, &self.x20[k])
    }

    fn span(&self, theta: &TowerElem) -> Result<Span, TowerError> {
        power_span(&self.tower, theta)
    }
}

struct Node21 {
    node: LatticeNode,
    gen: TowerElem,
    span: Span,
}

fn lattice_21(depth: usize) -> Result<LatticeGraph, LatticeError> {
    if depth == 0 || depth > MAX_21_DEPTH {
        return Err(LatticeError::BadDepth {
            depth,
            max: MAX_21_DEPTH,
        });
    }
    require_omega(&Pair::new(2, 1).unwrap(), depth)?;
    let amb = Ambient21::new(depth, depth - 1)?;
    let mut raw: Vec<(LatticeNode, TowerElem)> = vec![(node("Q", 1, "1"), TowerElem::one(depth))];
    for k in 1..depth {
        raw.push((
            node(format!("K20_{k}"), 1 << k, format!("x^{{2,0}}_{k}")),
            amb.x20[k].clone(),
        ));
        raw.push((
            node(format!("M_{k}"), 1 << k, format!("sqrt(3)*x^{{2,0}}_{k}")),
            amb.m(k)?,
        ));
    }
    for k in 1..=depth {
        raw.push((
            node(format!("K21_{k}"), 1 << k, format!("x^{{2,1}}_{k}")),
            amb.x21(k),
        ));
    }
    let mut nodes = Vec::new();
    for (n, gen) in raw {
        let span = amb.span(&gen)?;
        if span.rank() != n.degree {
            return Err(LatticeError::Certification {
                what: "node degree differs from the expected power of two",
                level: n.degree.trailing_zeros() as usize,
            });
        }
        nodes.push(Node21 { node: n, gen, span });
    }
    let mut g = LatticeGraph {
        nodes: nodes.iter().map(|n| n.node.clone()).collect(),
        ..Default::default()
    };
    for (i, a) in nodes.iter().enumerate() {
        for (j, b) in nodes.iter().enumerate() {
            if b.node.degree != 2 * a.node.degree {
                continue;
            }
            if let Some(c) = b.span.solve(&a.gen.flatten()) {
                g.push_edge(i, j, EdgeCert::Membership(c));
            }
        }
    }
    g.normalize();
    Ok(g)
}

/// One check of the `K^{2,1}` lattice verification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeCheck {
    pub name: &'static str,
    pub n: usize,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Lattice21Report {
    pub depth: usize,
    pub checks: Vec<LatticeCheck>,
    pub all_passed: bool,
    /// The subfields found at each degree `2^l`, `1 <= l <= depth - 1`.
    pub subfields_by_degree: Vec<(usize, Vec<String>)>,
    /// `Gal(K^{2,1}_depth / Q)`, recorded from the cyclotomic description.
    pub galois_group: String,
    pub notes: Vec<String>,
}

fn in_field(span: &Span, x: &TowerElem) -> bool {
    span.solve(&x.flatten()).is_some()
}

/// Check the structure of `K^{2,1}` up to `depth`:
/// (i) `sqrt3` is not in `K^{2,0}_n`;
/// (ii) `x^{2,1}_{n+1}` lies in `K^{2,0}_n(sqrt3)`;
/// (iii) `M_{n+1}` sits strictly between `K^{2,0}_n` and `K^{2,1}_{n+2}` and
/// differs from `K^{2,0}_{n+1}` and `K^{2,1}_{n+1}`;
/// (iv) `M_{n+1}` does not contain `M_n` (`n >= 1`; `M_0 = Q`);
/// (v) `K^{2,0}_l`, `M_l`, `K^{2,1}_l` are three distinct fields of degree `2^l`.
pub fn verify_21_lattice(depth: usize) -> Result<Lattice21Report, LatticeError> {
    if depth < 2 || depth >= MAX_21_DEPTH {
        return Err(LatticeError::BadDepth {
            depth,
            max: MAX_21_DEPTH - 1,
        });
    }
    let mut checks = Vec::new();
    let mut check = |name: &'static str, n: usize, passed: bool, detail: String| {
        checks.push(LatticeCheck {
            name,
            n,
            passed,
            detail,
        });
    };
    let p20 = Pair::new(2, 0).unwrap();
    let p21 = Pair::new(2, 1).unwrap();

    for n in 1..depth {
        let t20 = Tower::for_pair(&p20, n);
        let three = TowerElem::constant(n, rat(3));
        let absent = t20.sqrt(&three)?.is_none();
        check(
            "sqrt3_not_in_K20",
            n,
            absent,
            format!("3 is not a square in K^{{2,0}}_{n}"),
        );

        let ext = t20.extend(three)?;
        // In K^{2,0}_n(sqrt3) the top generator is sqrt3 = x^{2,1}_1.
        let mut img = TowerElem::generator(n + 1);
        let mut ok = true;
        for _ in 1..=n {
            match ext.sqrt(&img.add(&TowerElem::constant(n + 1, rat(2)))?)? {
                Some(w) => img = ext.positive_root(w),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        let detail = if ok {
            format!("x^{{2,1}}_{} = {}", n + 1, ext.render(&img))
        } else {
            "witness chain breaks".to_string()
        };
        check("x21_in_K20_adjoin_sqrt3", n, ok, detail);
    }

    let amb = Ambient21::new(depth + 1, depth)?;
    let k20: Vec<Span> = (0..=depth)
        .map(|k| amb.span(&amb.x20[k]))
        .collect::<Result<_, _>>()?;
    let k21: Vec<Span> = (0..=depth + 1)
        .map(|k| {
            amb.span(&if k == 0 {
                TowerElem::one(depth + 1)
            } else {
                amb.x21(k)
            })
        })
        .collect::<Result<_, _>>()?;
    let m_gen: Vec<TowerElem> = (0..=depth).map(|k| amb.m(k)).collect::<Result<_, _>>()?;
    let m_span: Vec<Span> = m_gen
        .iter()
        .map(|g| amb.span(g))
        .collect::<Result<_, _>>()?;

    for n in 0..depth {
        let m = n + 1;
        let deg = m_span[m].rank();
        let contains_k20 = in_field(&m_span[m], &amb.x20[n]);
        let inside_k21 = in_field(&k21[n + 2], &m_gen[m]);
        let not_k20 = !in_field(&k20[m], &m_gen[m]);
        let not_k21 = !in_field(&k21[m], &m_gen[m]);
        let passed = deg == 1 << m && contains_k20 && inside_k21 && not_k20 && not_k21;
        check(
            "M_between_K20_and_K21",
            n,
            passed,
            format!(
                "[M_{m}:Q] = {deg}; contains K^{{2,0}}_{n}: {contains_k20}; inside K^{{2,1}}_{}: {inside_k21}; \
                 differs from K^{{2,0}}_{m}: {not_k20}; differs from K^{{2,1}}_{m}: {not_k21}",
                n + 2
            ),
        );
        if n >= 1 {
            let excluded = !in_field(&m_span[m], &m_gen[n]);
            check(
                "M_does_not_contain_previous",
                n,
                excluded,
                format!("M_{n} not inside M_{m}"),
            );
        }
    }

    let m1_sq = amb.tower.square(&m_gen[1])?;
    let m1_ok = m1_sq == TowerElem::constant(depth + 1, rat(6));
    check(
        "M1_is_Q_sqrt6",
        1,
        m1_ok,
        "(sqrt3 * x^{2,0}_1)^2 = 6".to_string(),
    );

    let mut subfields_by_degree = Vec::new();
    for l in 1..depth {
        let gens = [(&amb.x20[l], "K20"), (&m_gen[l], "M"), (&amb.x21(l), "K21")];
        let spans = [&k20[l], &m_span[l], &k21[l]];
        let degrees_ok = spans.iter().all(|s| s.rank() == 1 << l);
        let mut distinct = true;
        for i in 0..3 {
            for j in 0..3 {
                if i != j && in_field(spans[j], gens[i].0) {
                    distinct = false;
                }
            }
        }
        let inside = gens.iter().all(|(g, _)| in_field(&k21[depth], g));
        check(
            "three_subfields_of_degree",
            l,
            degrees_ok && distinct && inside,
            format!(
                "degree {}: K20_{l}, M_{l}, K21_{l} pairwise distinct inside K21_{depth}",
                1 << l
            ),
        );
        subfields_by_degree.push((
            1 << l,
            gens.iter().map(|(_, s)| format!("{s}_{l}")).collect(),
        ));
    }

    require_omega(&p21, depth)?;
    let all_passed = checks.iter().all(|c| c.passed);
    Ok(Lattice21Report {
        depth,
        all_passed,
        checks,
        subfields_by_degree,
        galois_group: format!("C_{} x C_2", 1u64 << (depth - 1)),
        notes: vec![
            "the statement that K^{2,0} is the only proper subfield of infinite degree is not finitely checkable"
                .to_string(),
        ],
    })
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Deterministic DOT text: nodes ordered by degree then label, one rank per
/// degree, an edge per certified inclusion.
pub fn to_dot(graph: &LatticeGraph) -> String {
    let mut order: Vec<usize> = (0..graph.nodes.len()).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (&graph.nodes[a], &graph.nodes[b]);
        (x.degree, &x.label).cmp(&(y.degree, &y.label))
    });
    let mut out = String::from("digraph lattice {\n  rankdir=BT;\n");
    if !graph.nodes.is_empty() {
        out.push_str("  node [shape=box];\n");
    }
    for &i in &order {
        let n = &graph.nodes[i];
        let _ = writeln!(
            out,
            "  n{i} [label=\"{}\\n[{}] {}\"];",
            dot_escape(&n.label),
            n.degree,
            dot_escape(&n.generator)
        );
    }
    let mut degrees: Vec<usize> = graph.nodes.iter().map(|n| n.degree).collect();
    degrees.sort();
    degrees.dedup();
    for d in degrees {
        let members: Vec<String> = order
            .iter()
            .filter(|&&i| graph.nodes[i].degree == d)
            .map(|i| format!("n{i};"))
            .collect();
        let _ = writeln!(out, "  {{ rank=same; {} }}", members.join(" "));
    }
    let mut edges = graph.edges.clone();
    edges.sort();
    for (a, b) in edges {
        let _ = writeln!(out, "  n{a} -> n{b};");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(nu: i64, x0: i64) -> Pair {
        Pair::new(nu, x0).unwrap()
    }

    fn ds(v: &[QuadSubfield]) -> Vec<i64> {
        v.iter().map(|q| i64::try_from(&q.d).unwrap()).collect()
    }

    #[test]
    fn quadratic_subfield_examples() {
        assert_eq!(
            ds(&quadratic_subfields(&p(4, 3), 3).unwrap()),
            vec![7, 2, 14]
        );
        assert_eq!(
            ds(&quadratic_subfields(&p(2, 1), 3).unwrap()),
            vec![3, 2, 6]
        );
        assert_eq!(ds(&quadratic_subfields(&p(2, 0), 3).unwrap()), vec![2]);
        assert!(matches!(
            quadratic_subfields(&p(5, 4), 2),
            Err(LatticeError::NotVerified { .. })
        ));
    }

    #[test]
    fn witnesses_square_to_radicands() {
        let t = Tower::for_pair(&p(2, 1), 2);
        for q in quadratic_subfields(&p(2, 1), 2).unwrap() {
            assert_eq!(
                t.square(&q.root).unwrap(),
                TowerElem::constant(2, rat_int(&q.d))
            );
        }
    }

    #[test]
    fn thin_chain() {
        let g = build_lattice(&p(3, 0), 3).unwrap();
        assert_eq!(g.nodes.len(), 4);
        assert_eq!(g.edges.len(), 3);
        assert!(g.has_edge("K_2", "K_3"));
    }

    #[test]
    fn omega1_lattice_shape() {
        let g = build_lattice(&p(4, 3), 3).unwrap();
        let labels: Vec<&str> = g.nodes.iter().map(|n| n.label.as_str()).collect();
        assert_eq!(
            labels,
            vec!["Q", "K_1", "Q(sqrt(14))", "Q(sqrt(2))", "K_2", "K_3"]
        );
        assert!(g.has_edge("Q(sqrt(2))", "K_2"));
        assert!(g.has_edge("Q(sqrt(14))", "K_2"));
        assert!(!g.has_edge("Q(sqrt(2))", "K_3"));
        assert_eq!(g.edges.len(), 3 + 4);
    }

    #[test]
    fn lattice_21_depth3() {
        let g = build_lattice(&p(2, 1), 3).unwrap();
        assert_eq!(g.nodes.len(), 8);
        let expected = [
            ("Q", "K20_1"),
            ("Q", "M_1"),
            ("Q", "K21_1"),
            ("K20_1", "K20_2"),
            ("K20_1", "M_2"),
            ("K20_1", "K21_2"),
            ("M_1", "K21_2"),
            ("K21_1", "K21_2"),
            ("K20_2", "K21_3"),
            ("M_2", "K21_3"),
            ("K21_2", "K21_3"),
        ];
        for (a, b) in expected {
            assert!(g.has_edge(a, b), "{a} -> {b}");
        }
        assert_eq!(g.edges.len(), expected.len());
    }

    #[test]
    fn lattice_21_nodes_sit_in_next_k21() {
        let g = build_lattice(&p(2, 1), 4).unwrap();
        assert_eq!(g.nodes.len(), 11);
        for k in 1..4 {
            assert!(g.has_edge(&format!("K20_{k}"), &format!("K21_{}", k + 1)));
            assert!(g.has_edge(&format!("M_{k}"), &format!("K21_{}", k + 1)));
        }
    }

    #[test]
    fn embed_examples() {
        let r = embed_chain(&p(2, 0), &p(2, 1), 3, 4).unwrap();
        assert_eq!(r.first_failure, None);
        let r = embed_chain(&p(2, 0), &p(4, 3), 2, 4).unwrap();
        assert!(r.levels[0].found);
        assert_eq!(r.first_failure, Some(2));
        let r = embed_chain(&p(4, 3), &p(4, 3), 3, 3).unwrap();
        assert_eq!(r.first_failure, None);
        assert_eq!(
            r.levels[2].image.as_deref(),
            Some("sqrt(4+sqrt(4+sqrt(7)))")
        );
    }

    #[test]
    fn verify_21_depth3() {
        let r = verify_21_lattice(3).unwrap();
        assert!(r.all_passed, "{:#?}", r.checks);
        assert_eq!(r.galois_group, "C_4 x C_2");
        assert_eq!(r.subfields_by_degree.len(), 2);
    }

    #[test]
    fn dot_output() {
        let g = build_lattice(&p(3, 0), 2).unwrap();
        let dot = to_dot(&g);
        assert_eq!(dot.matches("->").count(), 2);
        assert_eq!(dot, to_dot(&g));
        let empty = to_dot(&LatticeGraph::default());
        assert_eq!(empty, "digraph lattice {\n  rankdir=BT;\n}\n");
    }
}
