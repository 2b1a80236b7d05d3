//! Groupoid cochains: nerves of finite groupoids and of polynomial action
//! groupoids, the coboundary `δ = Σ (−1)^i σ_i^*`, the cup product,
//! normalized cochains and the van Est map.
//!
//! A composable `q`-tuple `(a_1, …, a_q)` satisfies `s(a_i) = t(a_{i+1})`.
//! The face `σ_0` drops `a_1`, `σ_q` drops `a_q` and `σ_i` composes
//! `a_i a_{i+1}`; the degeneracy `Δ_j` inserts an identity in slot `j + 1`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::{One, Zero};
use rand::Rng;

use crate::algebroids::StructureData;
use crate::derivations::Derivation;
use crate::error::{Error, Result};
use crate::gca::{bounded_monomials, q as rat, Element, GeneratorTable, Monomial, Rational};
use crate::linalg;

/// Pullback structure of a nerve, with the cochain operations derived from it.
pub trait Nerve {
    type Cochain: Clone + PartialEq + std::fmt::Debug;

    fn level_of(&self, f: &Self::Cochain) -> usize;

    /// `σ_i^{q*}`: level `q − 1` to level `q`, for `0 ≤ i ≤ q`.
    fn face_pullback(&self, i: usize, q: usize, f: &Self::Cochain) -> Result<Self::Cochain>;

    /// `Δ_i^{(q−1)*}`: level `q` to level `q − 1`, for `0 ≤ i ≤ q − 1`.
    fn degeneracy_pullback(&self, i: usize, q: usize, f: &Self::Cochain) -> Result<Self::Cochain>;

    fn zero(&self, q: usize) -> Self::Cochain;
    fn add(&self, f: &Self::Cochain, g: &Self::Cochain) -> Result<Self::Cochain>;
    fn scale(&self, f: &Self::Cochain, c: &Rational) -> Self::Cochain;
    /// Pointwise product of two cochains of the same level.
    fn mul(&self, f: &Self::Cochain, g: &Self::Cochain) -> Result<Self::Cochain>;
    fn is_zero(&self, f: &Self::Cochain) -> bool;

    /// Cochains whose pullbacks determine a map out of level `q`.
    fn probes(&self, q: usize) -> Vec<Self::Cochain>;

    /// `δf = Σ_i (−1)^i σ_i^* f`.
    fn delta(&self, f: &Self::Cochain) -> Result<Self::Cochain> {
        let q = self.level_of(f) + 1;
        let mut out = self.zero(q);
        for i in 0..=q {
            let term = self.face_pullback(i, q, f)?;
            let term = if i % 2 == 0 {
                term
            } else {
                self.scale(&term, &rat(-1))
            };
            out = self.add(&out, &term)?;
        }
        Ok(out)
    }

    /// `f * g = (σ_{q+q'}^* ⋯ σ_{q+1}^* f) · (σ_0^* ⋯ σ_0^* g)`.
    fn cup(&self, f: &Self::Cochain, g: &Self::Cochain) -> Result<Self::Cochain> {
        let (p, r) = (self.level_of(f), self.level_of(g));
        let mut ff = f.clone();
        for k in p + 1..=p + r {
            ff = self.face_pullback(k, k, &ff)?;
        }
        let mut gg = g.clone();
        for k in r + 1..=p + r {
            gg = self.face_pullback(0, k, &gg)?;
        }
        self.mul(&ff, &gg)
    }

    /// True iff every degeneracy pullback vanishes.
    fn is_normalized(&self, f: &Self::Cochain) -> Result<bool> {
        let q = self.level_of(f);
        for i in 0..q {
            if !self.is_zero(&self.degeneracy_pullback(i, q, f)?) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Checks the face, degeneracy and mixed simplicial identities between
    /// levels up to `qmax`; returns a description of each failure.
    fn simplicial_failures(&self, qmax: usize) -> Result<Vec<String>> {
        let mut failures = Vec::new();
        // σ_i σ_j = σ_{j−1} σ_i for i < j, as maps out of level q
        for q in 2..=qmax {
            for f in self.probes(q - 2) {
                for j in 1..=q {
                    for i in 0..j {
                        let lhs = self.face_pullback(j, q, &self.face_pullback(i, q - 1, &f)?)?;
                        let rhs = self.face_pullback(i, q, &self.face_pullback(j - 1, q - 1, &f)?)?;
                        if lhs != rhs {
                            failures.push(format!("face identity i={i} j={j} q={q}"));
                        }
                    }
                }
            }
        }
        // Δ_i Δ_j = Δ_{j+1} Δ_i for i ≤ j, as maps out of level q
        for q in 0..=qmax.saturating_sub(2) {
            for f in self.probes(q + 2) {
                for j in 0..=q {
                    for i in 0..=j {
                        let lhs =
                            self.degeneracy_pullback(j, q + 1, &self.degeneracy_pullback(i, q + 2, &f)?)?;
                        let rhs =
                            self.degeneracy_pullback(i, q + 1, &self.degeneracy_pullback(j + 1, q + 2, &f)?)?;
                        if lhs != rhs {
                            failures.push(format!("degeneracy identity i={i} j={j} q={q}"));
                        }
                    }
                }
            }
        }
        // σ_i Δ_j, as maps out of level q
        for q in 0..qmax {
            for f in self.probes(q) {
                for j in 0..=q {
                    for i in 0..=q + 1 {
                        let lhs = self.degeneracy_pullback(j, q + 1, &self.face_pullback(i, q + 1, &f)?)?;
                        let rhs = if i < j {
                            self.face_pullback(i, q, &self.degeneracy_pullback(j - 1, q, &f)?)?
                        } else if i == j || i == j + 1 {
                            f.clone()
                        } else {
                            self.face_pullback(i - 1, q, &self.degeneracy_pullback(j, q, &f)?)?
                        };
                        if lhs != rhs {
                            failures.push(format!("face-degeneracy identity i={i} j={j} q={q}"));
                        }
                    }
                }
            }
        }
        Ok(failures)
    }
}

fn check_face(i: usize, q: usize) -> Result<()> {
    if i > q || q == 0 {
        Err(Error::IndexOutOfRange { index: i, level: q })
    } else {
        Ok(())
    }
}

fn check_degeneracy(i: usize, q: usize) -> Result<()> {
    if q == 0 || i >= q {
        Err(Error::IndexOutOfRange { index: i, level: q })
    } else {
        Ok(())
    }
}

fn level_mismatch(want: usize, got: usize) -> Error {
    Error::Shape(format!("cochain has level {got}, expected {want}"))
}

// ---------------------------------------------------------------------------
// finite groupoids

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroupoid {
    pub objects: Vec<String>,
    pub arrows: Vec<Arrow>,
    /// `compose[(a, b)] = a b`, defined iff `s(a) = t(b)`.
    compose: HashMap<(usize, usize), usize>,
    identity: Vec<usize>,
}

/// Values on the composable tuples of one level, in [`FiniteGroupoid::nerve`] order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteCochain {
    pub level: usize,
    pub values: Vec<Rational>,
}

impl FiniteGroupoid {
    /// Validates the groupoid axioms exhaustively.
    pub fn new(
        objects: Vec<String>,
        arrows: Vec<Arrow>,
        compose: HashMap<(usize, usize), usize>,
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidGroupoid(m));
        let n = arrows.len();
        for a in &arrows {
            if a.source >= objects.len() || a.target >= objects.len() {
                return bad(format!("arrow `{}` has an unknown endpoint", a.name));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let composable = arrows[a].source == arrows[b].target;
                match (composable, compose.get(&(a, b))) {
                    (true, None) => {
                        return bad(format!(
                            "composite {}·{} is missing",
                            arrows[a].name, arrows[b].name
                        ))
                    }
                    (false, Some(_)) => {
                        return bad(format!(
                            "composite {}·{} given for non-composable arrows",
                            arrows[a].name, arrows[b].name
                        ))
                    }
                    (true, Some(&c)) => {
                        if c >= n
                            || arrows[c].source != arrows[b].source
                            || arrows[c].target != arrows[a].target
                        {
                            return bad(format!(
                                "composite {}·{} has wrong endpoints",
                                arrows[a].name, arrows[b].name
                            ));
                        }
                    }
                    (false, None) => {}
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if let (Some(&ab), Some(&bc)) = (compose.get(&(a, b)), compose.get(&(b, c))) {
                        if compose.get(&(ab, c)) != compose.get(&(a, bc)) {
                            return bad(format!(
                                "associativity fails on ({}, {}, {})",
                                arrows[a].name, arrows[b].name, arrows[c].name
                            ));
                        }
                    }
                }
            }
        }
        let mut identity = Vec::with_capacity(objects.len());
        for x in 0..objects.len() {
            let e = (0..n).find(|&e| {
                arrows[e].source == x
                    && arrows[e].target == x
                    && (0..n).all(|a| {
                        (arrows[a].target != x || compose[&(e, a)] == a)
                            && (arrows[a].source != x || compose[&(a, e)] == a)
                    })
            });
            match e {
                Some(e) => identity.push(e),
                None => return bad(format!("object `{}` has no identity", objects[x])),
            }
        }
        for a in 0..n {
            let (s, t) = (arrows[a].source, arrows[a].target);
            let has_inverse = (0..n).any(|b| {
                compose.get(&(a, b)) == Some(&identity[t]) && compose.get(&(b, a)) == Some(&identity[s])
            });
            if !has_inverse {
                return bad(format!("arrow `{}` has no inverse", arrows[a].name));
            }
        }
        Ok(FiniteGroupoid {
            objects,
            arrows,
            compose,
            identity,
        })
    }

    /// A finite group on one object from its multiplication table.
    pub fn from_group(names: &[&str], table: &[Vec<usize>]) -> Result<Self> {
        let arrows = names
            .iter()
            .map(|n| Arrow {
                name: n.to_string(),
                source: 0,
                target: 0,
            })
            .collect();
        let mut compose = HashMap::new();
        for (a, row) in table.iter().enumerate() {
            for (b, &c) in row.iter().enumerate() {
                compose.insert((a, b), c);
            }
        }
        Self::new(vec!["*".into()], arrows, compose)
    }

    /// The cyclic group `ℤ/n`.
    pub fn cyclic(n: usize) -> Self {
        let names: Vec<String> = (0..n).map(|k| format!("r{k}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let table: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::from_group(&refs, &table).expect("cyclic group table")
    }

    pub fn identity(&self, x: usize) -> usize {
        self.identity[x]
    }

    pub fn is_identity(&self, a: usize) -> bool {
        self.identity.contains(&a)
    }

    /// Composable tuples of the given level, lexicographically. Level 0
    /// lists objects as one-element tuples.
    pub fn nerve(&self, q: usize) -> Vec<Vec<usize>> {
        if q == 0 {
            return (0..self.objects.len()).map(|x| vec![x]).collect();
        }
        let mut out: Vec<Vec<usize>> = (0..self.arrows.len()).map(|a| vec![a]).collect();
        for _ in 1..q {
            let mut next = Vec::new();
            for t in &out {
                let last = *t.last().expect("nonempty");
                for b in 0..self.arrows.len() {
                    if self.arrows[last].source == self.arrows[b].target {
                        let mut u = t.clone();
                        u.push(b);
                        next.push(u);
                    }
                }
            }
            out = next;
        }
        out
    }

    fn index(&self, q: usize) -> HashMap<Vec<usize>, usize> {
        self.nerve(q)
            .into_iter()
            .enumerate()
            .map(|(i, t)| (t, i))
            .collect()
    }

    /// Object `x_j` of a tuple of level `q ≥ 1`.
    fn vertex(&self, t: &[usize], j: usize) -> usize {
        if j == 0 {
            self.arrows[t[0]].target
        } else {
            self.arrows[t[j - 1]].source
        }
    }

    fn face(&self, i: usize, t: &[usize]) -> Vec<usize> {
        let q = t.len();
        if q == 1 {
            return vec![if i == 0 {
                self.arrows[t[0]].source
            } else {
                self.arrows[t[0]].target
            }];
        }
        let mut out = Vec::with_capacity(q - 1);
        if i == 0 {
            out.extend_from_slice(&t[1..]);
        } else if i == q {
            out.extend_from_slice(&t[..q - 1]);
        } else {
            out.extend_from_slice(&t[..i - 1]);
            out.push(self.compose[&(t[i - 1], t[i])]);
            out.extend_from_slice(&t[i + 1..]);
        }
        out
    }

    /// `Δ_j` applied to a tuple of level `q − 1`.
    fn degenerate(&self, j: usize, t: &[usize], level: usize) -> Vec<usize> {
        if level == 0 {
            return vec![self.identity[t[0]]];
        }
        let x = self.vertex(t, j);
        let mut out = t.to_vec();
        out.insert(j, self.identity[x]);
        out
    }

    /// Normalized cochains are those vanishing on tuples containing an identity.
    pub fn nondegenerate(&self, q: usize) -> Vec<usize> {
        self.nerve(q)
            .iter()
            .enumerate()
            .filter(|(_, t)| q == 0 || t.iter().all(|&a| !self.is_identity(a)))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn cochain(&self, level: usize, values: Vec<Rational>) -> Result<FiniteCochain> {
        let n = self.nerve(level).len();
        if values.len() != n {
            return Err(Error::Shape(format!(
                "level {level} has {n} tuples, got {} values",
                values.len()
            )));
        }
        Ok(FiniteCochain { level, values })
    }

    /// Cochain with random small values on nondegenerate tuples and zero elsewhere.
    pub fn random_normalized<R: Rng>(&self, rng: &mut R, level: usize) -> FiniteCochain {
        let mut values = vec![Rational::zero(); self.nerve(level).len()];
        for i in self.nondegenerate(level) {
            values[i] = rat(rng.gen_range(-3..=3));
        }
        FiniteCochain { level, values }
    }

    pub fn random_cochain<R: Rng>(&self, rng: &mut R, level: usize) -> FiniteCochain {
        let values = (0..self.nerve(level).len())
            .map(|_| rat(rng.gen_range(-3..=3)))
            .collect();
        FiniteCochain { level, values }
    }

    /// Dimensions of the normalized cohomology `H^0 … H^{max}` over ℚ.
    pub fn normalized_cohomology(&self, max: usize) -> Result<Vec<usize>> {
        let mut dims = Vec::new();
        let mut ranks = Vec::new();
        for n in 0..=max {
            let src = self.nondegenerate(n);
            let dst = self.nondegenerate(n + 1);
            let mut cols = Vec::with_capacity(src.len());
            for &i in &src {
                let mut v = vec![Rational::zero(); self.nerve(n).len()];
                v[i] = Rational::one();
                let d = self.delta(&FiniteCochain { level: n, values: v })?;
                cols.push(dst.iter().map(|&k| d.values[k].clone()).collect::<Vec<_>>());
            }
            ranks.push(linalg::rank(&cols, dst.len()));
            dims.push(src.len());
        }
        Ok((0..=max)
            .map(|n| dims[n] - ranks[n] - if n == 0 { 0 } else { ranks[n - 1] })
            .collect())
    }
}

impl Nerve for FiniteGroupoid {
    type Cochain = FiniteCochain;

    fn level_of(&self, f: &FiniteCochain) -> usize {
        f.level
    }

    fn face_pullback(&self, i: usize, q: usize, f: &FiniteCochain) -> Result<FiniteCochain> {
        check_face(i, q)?;
        if f.level + 1 != q {
            return Err(level_mismatch(q - 1, f.level));
        }
        let idx = self.index(q - 1);
        let values = self
            .nerve(q)
            .iter()
            .map(|t| f.values[idx[&self.face(i, t)]].clone())
            .collect();
        Ok(FiniteCochain { level: q, values })
    }

    fn degeneracy_pullback(&self, i: usize, q: usize, f: &FiniteCochain) -> Result<FiniteCochain> {
        check_degeneracy(i, q)?;
        if f.level != q {
            return Err(level_mismatch(q, f.level));
        }
        let idx = self.index(q);
        let values = self
            .nerve(q - 1)
            .iter()
            .map(|t| f.values[idx[&self.degenerate(i, t, q - 1)]].clone())
            .collect();
        Ok(FiniteCochain { level: q - 1, values })
    }

    fn zero(&self, q: usize) -> FiniteCochain {
        FiniteCochain {
            level: q,
            values: vec![Rational::zero(); self.nerve(q).len()],
        }
    }

    fn add(&self, f: &FiniteCochain, g: &FiniteCochain) -> Result<FiniteCochain> {
        if f.level != g.level {
            return Err(level_mismatch(f.level, g.level));
        }
        Ok(FiniteCochain {
            level: f.level,
            values: f.values.iter().zip(&g.values).map(|(a, b)| a + b).collect(),
        })
    }

    fn scale(&self, f: &FiniteCochain, c: &Rational) -> FiniteCochain {
        FiniteCochain {
            level: f.level,
            values: f.values.iter().map(|a| a * c).collect(),
        }
    }

    fn mul(&self, f: &FiniteCochain, g: &FiniteCochain) -> Result<FiniteCochain> {
        if f.level != g.level {
            return Err(level_mismatch(f.level, g.level));
        }
        Ok(FiniteCochain {
            level: f.level,
            values: f.values.iter().zip(&g.values).map(|(a, b)| a * b).collect(),
        })
    }

    fn is_zero(&self, f: &FiniteCochain) -> bool {
        f.values.iter().all(Zero::is_zero)
    }

    fn probes(&self, q: usize) -> Vec<FiniteCochain> {
        let n = self.nerve(q).len();
        (0..n)
            .map(|i| {
                let mut v = vec![Rational::zero(); n];
                v[i] = Rational::one();
                FiniteCochain { level: q, values: v }
            })
            .collect()
    }
}

// ---------------------------------------------------------------------------
// polynomial action groupoids

/// `M = ℝ^m` acted on from the right by `G = ℝ^n` with a polynomial law.
#[derive(Clone, Debug)]
pub struct PolyActionGroupoid {
    m: usize,
    n: usize,
    /// Over `g1..gn, h1..hn`.
    mu: Vec<Element>,
    /// Over `x1..xm, g1..gn`.
    action: Vec<Element>,
}

/// A cochain of level `q`: a polynomial in `x`, `g_1`, …, `g_q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyCochain {
    pub level: usize,
    pub f: Element,
}

impl PolyActionGroupoid {
    /// Table `g1..gn, h1..hn` on which the group law is written.
    pub fn law_table(n: usize) -> Arc<GeneratorTable> {
        GeneratorTable::new(
            (1..=n)
                .map(|a| (format!("g{a}"), 0))
                .chain((1..=n).map(|a| (format!("h{a}"), 0))),
        )
        .expect("distinct names")
    }

    /// Table `x1..xm, g1..gn` on which the action is written.
    pub fn action_table(m: usize, n: usize) -> Arc<GeneratorTable> {
        GeneratorTable::new(
            (1..=m)
                .map(|i| (format!("x{i}"), 0))
                .chain((1..=n).map(|a| (format!("g{a}"), 0))),
        )
        .expect("distinct names")
    }

    /// Validates unit, associativity and action axioms symbolically.
    pub fn new(m: usize, n: usize, mu: Vec<Element>, action: Vec<Element>) -> Result<Self> {
        let lt = Self::law_table(n);
        let at = Self::action_table(m, n);
        if mu.len() != n || action.len() != m {
            return Err(Error::Shape(format!(
                "need {n} law polynomials and {m} action polynomials"
            )));
        }
        let lift = |e: &Element, t: &Arc<GeneratorTable>| -> Result<Element> {
            if e.is_zero() {
                Ok(Element::zero(t))
            } else {
                e.reinterpret(t)
            }
        };
        let mu: Vec<Element> = mu.iter().map(|e| lift(e, &lt)).collect::<Result<_>>()?;
        let action: Vec<Element> = action.iter().map(|e| lift(e, &at)).collect::<Result<_>>()?;
        let gpd = PolyActionGroupoid { m, n, mu, action };
        gpd.validate()?;
        Ok(gpd)
    }

    pub fn base_dim(&self) -> usize {
        self.m
    }

    pub fn group_dim(&self) -> usize {
        self.n
    }

    /// `x1..xm, g1_1..g1_n, …, gq_1..gq_n`.
    pub fn level_table(&self, q: usize) -> Arc<GeneratorTable> {
        GeneratorTable::new(
            (1..=self.m)
                .map(|i| (format!("x{i}"), 0))
                .chain((1..=q).flat_map(|k| (1..=self.n).map(move |a| (format!("g{k}_{a}"), 0)))),
        )
        .expect("distinct names")
    }

    /// Index of `g_k^a` (1-based slot `k`, 0-based component `a`).
    pub fn slot(&self, k: usize, a: usize) -> usize {
        self.m + (k - 1) * self.n + a
    }

    fn gens(&self, t: &Arc<GeneratorTable>, range: std::ops::Range<usize>) -> Vec<Element> {
        range.map(|i| Element::generator(t, i)).collect()
    }

    /// `μ(u, v)` for group-valued tuples of elements.
    fn law(&self, u: &[Element], v: &[Element]) -> Result<Vec<Element>> {
        let images: Vec<Element> = u.iter().chain(v).cloned().collect();
        self.mu.iter().map(|p| p.substitute(&images)).collect()
    }

    /// `s(x, g)`.
    fn act(&self, x: &[Element], g: &[Element]) -> Result<Vec<Element>> {
        let images: Vec<Element> = x.iter().chain(g).cloned().collect();
        self.action.iter().map(|p| p.substitute(&images)).collect()
    }

    fn validate(&self) -> Result<()> {
        let (m, n) = (self.m, self.n);
        let t = GeneratorTable::new(
            (1..=m)
                .map(|i| (format!("x{i}"), 0))
                .chain((1..=n).map(|a| (format!("g{a}"), 0)))
                .chain((1..=n).map(|a| (format!("h{a}"), 0)))
                .chain((1..=n).map(|a| (format!("k{a}"), 0))),
        )?;
        let x = self.gens(&t, 0..m);
        let g = self.gens(&t, m..m + n);
        let h = self.gens(&t, m + n..m + 2 * n);
        let k = self.gens(&t, m + 2 * n..m + 3 * n);
        let zero = vec![Element::zero(&t); n];
        let bad = |what: &str| Err(Error::InvalidGroupoid(what.to_string()));
        if self.law(&g, &zero)? != g || self.law(&zero, &g)? != g {
            return bad("group law is not unital at 0");
        }
        if self.law(&self.law(&g, &h)?, &k)? != self.law(&g, &self.law(&h, &k)?)? {
            return bad("group law is not associative");
        }
        if self.act(&x, &zero)? != x {
            return bad("action does not fix points at the identity");
        }
        if self.act(&self.act(&x, &g)?, &h)? != self.act(&x, &self.law(&g, &h)?)? {
            return bad("action is not compatible with the group law");
        }
        Ok(())
    }

    /// Left-invariant frame `J_a^i(g) = ∂μ^i/∂h^a(g, 0)` as fields on `g1..gn`.
    pub fn left_invariant_frame(&self) -> Result<Vec<Derivation>> {
        let n = self.n;
        let lt = Self::law_table(n);
        let gt = GeneratorTable::new((1..=n).map(|a| (format!("g{a}"), 0)))?;
        let mut restrict: Vec<Element> = self.gens(&gt, 0..n);
        restrict.extend(std::iter::repeat_n(Element::zero(&gt), n));
        (0..n)
            .map(|a| {
                let dh = Derivation::partial(&lt, n + a);
                let images = self
                    .mu
                    .iter()
                    .map(|p| dh.on(p).substitute(&restrict))
                    .collect::<Result<Vec<_>>>()?;
                Derivation::new(&gt, 0, images)
            })
            .collect()
    }

    /// Structure constants from `[X_a, X_b] = c_{ab}^e X_e`.
    pub fn structure_constants(&self) -> Result<Vec<Vec<Vec<Rational>>>> {
        let n = self.n;
        let frame = self.left_invariant_frame()?;
        let gt = frame.first().map(|d| d.table().clone());
        let mut c = vec![vec![vec![Rational::zero(); n]; n]; n];
        for a in 0..n {
            for b in 0..n {
                let br = frame[a].bracket(&frame[b])?;
                let gt = gt.as_ref().expect("n > 0");
                let at_zero: Vec<Rational> = br
                    .images()
                    .iter()
                    .map(|e| e.coefficient(&Monomial::one()))
                    .collect();
                let mut rhs = Derivation::zero(gt, 0);
                for e in 0..n {
                    rhs = rhs.checked_add(&frame[e].scale(&at_zero[e]))?;
                }
                if rhs != br {
                    return Err(Error::InvalidGroupoid(format!(
                        "left-invariant frame does not close on ({}, {})",
                        a + 1,
                        b + 1
                    )));
                }
                c[a][b] = at_zero;
            }
        }
        Ok(c)
    }

    /// The infinitesimal algebroid: base `x1..xm`, frames `λ1..λn` with
    /// anchor `ρ_a^i = ∂s^i/∂g^a(x, 0)` and the frame's structure constants.
    pub fn algebroid(&self) -> Result<StructureData> {
        let (m, n) = (self.m, self.n);
        let base = GeneratorTable::new((1..=m).map(|i| (format!("x{i}"), 0)))?;
        let at = Self::action_table(m, n);
        let mut restrict: Vec<Element> = self.gens(&base, 0..m);
        restrict.extend(std::iter::repeat_n(Element::zero(&base), n));
        let mut anchor = Vec::with_capacity(n);
        for a in 0..n {
            let dg = Derivation::partial(&at, m + a);
            anchor.push(
                self.action
                    .iter()
                    .map(|s| dg.on(s).substitute(&restrict))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        let c = self.structure_constants()?;
        let brackets = c
            .iter()
            .map(|ca| {
                ca.iter()
                    .map(|cab| cab.iter().map(|v| Element::scalar(&base, v.clone())).collect())
                    .collect()
            })
            .collect();
        let frames: Vec<(String, i64)> = (1..=n).map(|a| (format!("λ{a}"), 0)).collect();
        StructureData::new(&base, &frames, anchor, brackets)
    }

    pub fn cochain(&self, level: usize, f: Element) -> Result<PolyCochain> {
        let t = self.level_table(level);
        let f = if f.is_zero() {
            Element::zero(&t)
        } else {
            f.reinterpret(&t)?
        };
        Ok(PolyCochain { level, f })
    }

    /// Coordinate function by name at the given level.
    pub fn coordinate(&self, level: usize, name: &str) -> Result<PolyCochain> {
        let t = self.level_table(level);
        Ok(PolyCochain {
            level,
            f: Element::var(&t, name)?,
        })
    }

    /// Random polynomial of word length at most `max_degree`.
    pub fn random_cochain<R: Rng>(&self, rng: &mut R, level: usize, max_degree: u32) -> PolyCochain {
        let t = self.level_table(level);
        let mut terms = Vec::new();
        for m in bounded_monomials(&t, 0, max_degree) {
            if rng.gen_bool(0.5) {
                terms.push((m, crate::random::rational(rng)));
            }
        }
        PolyCochain {
            level,
            f: Element::from_terms(&t, terms),
        }
    }

    /// Projection `Π_k (1 − E_k)` onto normalized cochains, where `E_k`
    /// restricts slot `k` to the identity.
    pub fn normalize(&self, f: &PolyCochain) -> Result<PolyCochain> {
        let t = self.level_table(f.level);
        let mut out = f.f.clone();
        for k in 1..=f.level {
            let images = (0..self.n)
                .map(|a| (self.slot(k, a), Element::zero(&t)))
                .collect::<BTreeMap<_, _>>();
            out = &out - &out.substitute_partial(&images)?;
        }
        Ok(PolyCochain {
            level: f.level,
            f: out,
        })
    }

    pub fn random_normalized<R: Rng>(
        &self,
        rng: &mut R,
        level: usize,
        max_degree: u32,
    ) -> Result<PolyCochain> {
        self.normalize(&self.random_cochain(rng, level, max_degree))
    }

    /// The van Est image: for `a_1 < … < a_q` the coefficient of
    /// `λ^{a_1}⋯λ^{a_q}` is `Σ_γ sgn γ X^1_{a_γ(1)} ⋯ X^q_{a_γ(q)} f`, where
    /// `X^k_a` differentiates slot `k` along the left-invariant frame and then
    /// restricts that slot to the identity.
    pub fn van_est(&self, f: &PolyCochain, s: &StructureData) -> Result<Element> {
        if !self.is_normalized(f)? {
            return Err(Error::NotNormalized(format!("{}", f.f)));
        }
        let q = f.level;
        let target = s.algebra();
        let base = s.base();
        let frame = self.left_invariant_frame()?;
        let mut out = Element::zero(target);
        for subset in combinations(self.n, q) {
            let mut coef = Element::zero(base);
            for (perm, odd) in permutations(q) {
                let mut g = f.clone();
                for k in (1..=q).rev() {
                    g = self.differentiate_last(&g, &frame[subset[perm[k - 1]]])?;
                }
                let val = if g.f.is_zero() {
                    Element::zero(base)
                } else {
                    g.f.reinterpret(base)?
                };
                coef = if odd { &coef - &val } else { &coef + &val };
            }
            if coef.is_zero() {
                continue;
            }
            let mut term = coef.reinterpret(target)?;
            for &a in &subset {
                term = &term * &Element::generator(target, s.fiber_index(a));
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// `X^q f`: apply the frame field on the last slot, then set it to 0.
    fn differentiate_last(&self, f: &PolyCochain, field: &Derivation) -> Result<PolyCochain> {
        let q = f.level;
        let t = self.level_table(q);
        let mut d = Element::zero(&t);
        for i in 0..self.n {
            let ji = field.image(i);
            if ji.is_zero() {
                continue;
            }
            // J(g) evaluated on the last slot
            let slot_images: Vec<Element> = (0..self.n)
                .map(|a| Element::generator(&t, self.slot(q, a)))
                .collect();
            let j_on_slot = ji.substitute(&slot_images)?;
            let partial = Derivation::partial(&t, self.slot(q, i)).on(&f.f);
            d = &d + &(&j_on_slot * &partial);
        }
        let lower = self.level_table(q - 1);
        let mut images: Vec<Element> = (0..lower.len()).map(|i| Element::generator(&lower, i)).collect();
        images.extend(std::iter::repeat_n(Element::zero(&lower), self.n));
        Ok(PolyCochain {
            level: q - 1,
            f: d.substitute_into(&lower, &images)?,
        })
    }
}

/// Increasing `k`-subsets of `0..n`.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Permutations of `0..k` with their parity (`true` = odd).
fn permutations(k: usize) -> Vec<(Vec<usize>, bool)> {
    if k == 0 {
        return vec![(Vec::new(), false)];
    }
    let mut out = Vec::new();
    for (p, odd) in permutations(k - 1) {
        // insert k−1 at each position; moving it left past j entries flips parity j times
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push((q, odd ^ ((p.len() - pos) % 2 == 1)));
        }
    }
    out
}

impl Nerve for PolyActionGroupoid {
    type Cochain = PolyCochain;

    fn level_of(&self, f: &PolyCochain) -> usize {
        f.level
    }

    fn face_pullback(&self, i: usize, q: usize, f: &PolyCochain) -> Result<PolyCochain> {
        check_face(i, q)?;
        if f.level + 1 != q {
            return Err(level_mismatch(q - 1, f.level));
        }
        let t = self.level_table(q);
        let (m, n) = (self.m, self.n);
        let slot =
            |k: usize| -> Vec<Element> { (0..n).map(|a| Element::generator(&t, self.slot(k, a))).collect() };
        let x = self.gens(&t, 0..m);
        let mut images: Vec<Element> = if i == 0 { self.act(&x, &slot(1))? } else { x };
        for k in 1..q {
            let img = if i == 0 || k > i {
                slot(k + 1)
            } else if k < i {
                slot(k)
            } else {
                self.law(&slot(k), &slot(k + 1))?
            };
            images.extend(img);
        }
        Ok(PolyCochain {
            level: q,
            f: f.f.substitute_into(&t, &images)?,
        })
    }

    fn degeneracy_pullback(&self, i: usize, q: usize, f: &PolyCochain) -> Result<PolyCochain> {
        check_degeneracy(i, q)?;
        if f.level != q {
            return Err(level_mismatch(q, f.level));
        }
        let t = self.level_table(q - 1);
        let (m, n) = (self.m, self.n);
        let mut images = self.gens(&t, 0..m);
        for k in 1..=q {
            if k == i + 1 {
                images.extend(std::iter::repeat_n(Element::zero(&t), n));
            } else {
                let src = if k <= i { k } else { k - 1 };
                images.extend((0..n).map(|a| Element::generator(&t, self.slot(src, a))));
            }
        }
        Ok(PolyCochain {
            level: q - 1,
            f: f.f.substitute_into(&t, &images)?,
        })
    }

    fn zero(&self, q: usize) -> PolyCochain {
        PolyCochain {
            level: q,
            f: Element::zero(&self.level_table(q)),
        }
    }

    fn add(&self, f: &PolyCochain, g: &PolyCochain) -> Result<PolyCochain> {
        if f.level != g.level {
            return Err(level_mismatch(f.level, g.level));
        }
        Ok(PolyCochain {
            level: f.level,
            f: f.f.checked_add(&g.f).map_err(|_| Error::MismatchedGroupoid)?,
        })
    }

    fn scale(&self, f: &PolyCochain, c: &Rational) -> PolyCochain {
        PolyCochain {
            level: f.level,
            f: f.f.scale(c),
        }
    }

    fn mul(&self, f: &PolyCochain, g: &PolyCochain) -> Result<PolyCochain> {
        if f.level != g.level {
            return Err(level_mismatch(f.level, g.level));
        }
        Ok(PolyCochain {
            level: f.level,
            f: f.f.checked_mul(&g.f).map_err(|_| Error::MismatchedGroupoid)?,
        })
    }

    fn is_zero(&self, f: &PolyCochain) -> bool {
        f.f.is_zero()
    }

    fn probes(&self, q: usize) -> Vec<PolyCochain> {
        let t = self.level_table(q);
        (0..t.len())
            .map(|i| PolyCochain {
                level: q,
                f: Element::generator(&t, i),
            })
            .collect()
    }
}

/// `(ℝ, +)` acting trivially on a point.
pub fn additive_line() -> PolyActionGroupoid {
    let lt = PolyActionGroupoid::law_table(1);
    let mu = vec![&Element::generator(&lt, 0) + &Element::generator(&lt, 1)];
    PolyActionGroupoid::new(0, 1, mu, vec![]).expect("additive group")
}

/// `(ℝ, +)` acting on `ℝ²` by shears `(x, y) ↦ (x, y + g x)`.
pub fn shear_plane() -> PolyActionGroupoid {
    let lt = PolyActionGroupoid::law_table(1);
    let at = PolyActionGroupoid::action_table(2, 1);
    let mu = vec![&Element::generator(&lt, 0) + &Element::generator(&lt, 1)];
    let x = Element::generator(&at, 0);
    let y = Element::generator(&at, 1);
    let g = Element::generator(&at, 2);
    PolyActionGroupoid::new(2, 1, mu, vec![x.clone(), &y + &(&g * &x)]).expect("shear action")
}

/// The Heisenberg group `μ = (a + a', b + b', c + c' + a b')` on a point.
pub fn heisenberg_group() -> PolyActionGroupoid {
    let lt = PolyActionGroupoid::law_table(3);
    let e = |i| Element::generator(&lt, i);
    let mu = vec![&e(0) + &e(3), &e(1) + &e(4), &(&e(2) + &e(5)) + &(&e(0) * &e(4))];
    PolyActionGroupoid::new(0, 3, mu, vec![]).expect("Heisenberg group")
}
