//! Free ℤ-graded graded-commutative algebras over ℚ.
//!
//! Generators carry an integer degree; odd-degree generators anticommute and
//! square to zero, even-degree generators commute. Elements are finite
//! rational combinations of monomials kept in a canonical sorted form, so two
//! elements are equal exactly when their term maps are equal.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Shorthand for an integer-valued rational.
pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `num / den`.
pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    pub degree: i64,
}

impl Generator {
    pub fn is_odd(&self) -> bool {
        self.degree.rem_euclid(2) == 1
    }
}

/// Ordered list of named generators. The declaration order is the canonical
/// monomial order, and therefore fixes every Koszul sign.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct GeneratorTable {
    gens: Vec<Generator>,
}

impl GeneratorTable {
    pub fn new<I, S>(gens: I) -> Result<Arc<Self>>
    where
        I: IntoIterator<Item = (S, i64)>,
        S: Into<String>,
    {
        let gens: Vec<Generator> = gens
            .into_iter()
            .map(|(name, degree)| Generator {
                name: name.into(),
                degree,
            })
            .collect();
        let mut seen = HashSet::new();
        for g in &gens {
            if g.name.is_empty() {
                return Err(Error::InvalidTable("empty generator name".into()));
            }
            if !seen.insert(g.name.as_str()) {
                return Err(Error::InvalidTable(format!(
                    "duplicate generator name `{}`",
                    g.name
                )));
            }
        }
        Ok(Arc::new(GeneratorTable { gens }))
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn generator(&self, i: usize) -> &Generator {
        &self.gens[i]
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.gens[i].degree
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.gens[i].is_odd()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name == name)
    }

    pub fn name(&self, i: usize) -> &str {
        &self.gens[i].name
    }
}

pub(crate) fn same_table(a: &Arc<GeneratorTable>, b: &Arc<GeneratorTable>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A monomial as a strictly increasing list of `(generator, exponent)` pairs.
///
/// Odd generators always have exponent 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<(u32, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn generator(i: usize) -> Self {
        Monomial(vec![(i as u32, 1)])
    }

    /// Builds a monomial from an exponent vector indexed by generator.
    /// Returns `None` if an odd generator appears with exponent above one.
    pub fn from_exponents(table: &GeneratorTable, exps: &[u32]) -> Option<Self> {
        let mut v = Vec::new();
        for (i, &e) in exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if table.is_odd(i) && e > 1 {
                return None;
            }
            v.push((i as u32, e));
        }
        Some(Monomial(v))
    }

    pub fn factors(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0.iter().map(|&(i, e)| (i as usize, e))
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.0
            .iter()
            .find(|&&(g, _)| g as usize == i)
            .map_or(0, |&(_, e)| e)
    }

    /// Total word length (sum of exponents).
    pub fn length(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn degree(&self, table: &GeneratorTable) -> i64 {
        self.0
            .iter()
            .map(|&(i, e)| table.degree(i as usize) * e as i64)
            .sum()
    }

    pub fn weight(&self, weights: &WeightAssignment) -> i64 {
        self.0
            .iter()
            .map(|&(i, e)| weights.0[i as usize] * e as i64)
            .sum()
    }

    /// Product of two monomials with its Koszul sign, or `None` when an odd
    /// generator would appear twice.
    ///
    /// The sign is the parity of the number of odd-odd inversions when the
    /// concatenation `self · other` is sorted into canonical order.
    pub fn mul(&self, other: &Monomial, table: &GeneratorTable) -> Option<(bool, Monomial)> {
        // odd generators of `self` at positions >= p
        let mut odd_suffix = vec![0usize; self.0.len() + 1];
        for p in (0..self.0.len()).rev() {
            odd_suffix[p] = odd_suffix[p + 1] + usize::from(table.is_odd(self.0[p].0 as usize));
        }
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let mut negative = false;
        let (mut a, mut b) = (0, 0);
        while a < self.0.len() || b < other.0.len() {
            if b == other.0.len() {
                out.push(self.0[a]);
                a += 1;
            } else if a == self.0.len() {
                out.push(other.0[b]);
                b += 1;
            } else {
                let (ia, ea) = self.0[a];
                let (ib, eb) = other.0[b];
                if ia < ib {
                    out.push((ia, ea));
                    a += 1;
                } else if ib < ia {
                    if table.is_odd(ib as usize) && odd_suffix[a] % 2 == 1 {
                        negative = !negative;
                    }
                    out.push((ib, eb));
                    b += 1;
                } else {
                    if table.is_odd(ia as usize) {
                        return None;
                    }
                    // even generator: commutes with everything it passes
                    out.push((ia, ea + eb));
                    a += 1;
                    b += 1;
                }
            }
        }
        Some((negative, Monomial(out)))
    }

    pub fn display(&self, table: &GeneratorTable) -> String {
        if self.0.is_empty() {
            return "1".into();
        }
        self.0
            .iter()
            .map(|&(i, e)| {
                if e == 1 {
                    table.name(i as usize).to_string()
                } else {
                    format!("{}^{}", table.name(i as usize), e)
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// Integer weights per generator, used to cut infinite-dimensional degree
/// pieces (polynomial coordinates of degree 0) into finite blocks.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightAssignment(pub Vec<i64>);

impl WeightAssignment {
    pub fn new(weights: Vec<i64>) -> Self {
        WeightAssignment(weights)
    }

    pub fn of(&self, i: usize) -> i64 {
        self.0[i]
    }

    /// The set of weights occurring in `a`.
    pub fn weights_of(&self, a: &Element) -> Vec<i64> {
        let mut w: Vec<i64> = a.terms().map(|(m, _)| m.weight(self)).collect();
        w.sort_unstable();
        w.dedup();
        w
    }
}

/// Finite rational combination of monomials over a [`GeneratorTable`].
#[derive(Clone, Debug)]
pub struct Element {
    table: Arc<GeneratorTable>,
    terms: BTreeMap<Monomial, Rational>,
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        same_table(&self.table, &other.table) && self.terms == other.terms
    }
}

impl Eq for Element {}

impl Element {
    pub fn zero(table: &Arc<GeneratorTable>) -> Self {
        Element {
            table: table.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(table: &Arc<GeneratorTable>) -> Self {
        Self::scalar(table, Rational::one())
    }

    pub fn scalar(table: &Arc<GeneratorTable>, c: Rational) -> Self {
        Self::monomial(table, Monomial::one(), c)
    }

    pub fn monomial(table: &Arc<GeneratorTable>, m: Monomial, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Element {
            table: table.clone(),
            terms,
        }
    }

    pub fn generator(table: &Arc<GeneratorTable>, i: usize) -> Self {
        assert!(i < table.len(), "generator index {i} out of range");
        Self::monomial(table, Monomial::generator(i), Rational::one())
    }

    /// The generator with the given name.
    pub fn var(table: &Arc<GeneratorTable>, name: &str) -> Result<Self> {
        table
            .index_of(name)
            .map(|i| Self::generator(table, i))
            .ok_or_else(|| Error::InvalidTable(format!("no generator named `{name}`")))
    }

    /// Collects terms, summing duplicates and dropping zeros.
    pub fn from_terms<I>(table: &Arc<GeneratorTable>, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut e = Self::zero(table);
        for (m, c) in terms {
            e.add_term(m, c);
        }
        e
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn table(&self) -> &Arc<GeneratorTable> {
        &self.table
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// The degree when `self` is nonzero and homogeneous.
    pub fn degree(&self) -> Option<i64> {
        let mut it = self.terms.keys().map(|m| m.degree(&self.table));
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// True when all terms share a degree; zero counts as homogeneous.
    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.degree().is_some()
    }

    /// Maximum word length over the terms (0 for zero and scalars).
    pub fn max_length(&self) -> u32 {
        self.terms.keys().map(Monomial::length).max().unwrap_or(0)
    }

    /// Splits into homogeneous components keyed by degree.
    pub fn degree_components(&self) -> BTreeMap<i64, Element> {
        let mut out: BTreeMap<i64, Element> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.degree(&self.table))
                .or_insert_with(|| Element::zero(&self.table))
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.table);
        }
        Element {
            table: self.table.clone(),
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn checked_add(&self, other: &Element) -> Result<Element> {
        if !same_table(&self.table, &other.table) {
            return Err(Error::MismatchedAlgebra);
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Element) -> Result<Element> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Element) -> Result<Element> {
        if !same_table(&self.table, &other.table) {
            return Err(Error::MismatchedAlgebra);
        }
        let mut out = Element::zero(&self.table);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((neg, m)) = ma.mul(mb, &self.table) {
                    let c = ca * cb;
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    /// Multiplies every term by a monomial on the left.
    pub(crate) fn mul_monomial_left(&self, m: &Monomial, c: &Rational) -> Element {
        let mut out = Element::zero(&self.table);
        for (mb, cb) in &self.terms {
            if let Some((neg, prod)) = m.mul(mb, &self.table) {
                let k = c * cb;
                out.add_term(prod, if neg { -k } else { k });
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Element {
        let mut acc = Element::one(&self.table);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Applies the algebra morphism sending generator `i` to `images[i]`.
    ///
    /// All images must live over one common target table and be homogeneous
    /// of the same degree as the generator they replace (zero is allowed).
    pub fn substitute(&self, images: &[Element]) -> Result<Element> {
        if images.is_empty() && self.table.is_empty() {
            return Ok(self.clone());
        }
        let target = check_images(&self.table, images)?;
        self.substitute_into(&target, images)
    }

    /// Like [`Element::substitute`] with an explicit target, so that elements
    /// over an empty table can be mapped.
    pub fn substitute_into(&self, target: &Arc<GeneratorTable>, images: &[Element]) -> Result<Element> {
        if images.is_empty() && self.table.is_empty() {
            return Ok(Element::scalar(target, self.coefficient(&Monomial::one())));
        }
        if !same_table(&check_images(&self.table, images)?, target) {
            return Err(Error::MismatchedAlgebra);
        }
        let mut cache: HashMap<(usize, u32), Element> = HashMap::new();
        let mut out = Element::zero(target);
        for (m, c) in &self.terms {
            let mut prod = Element::scalar(target, c.clone());
            for (i, e) in m.factors() {
                let p = cache.entry((i, e)).or_insert_with(|| images[i].pow(e)).clone();
                prod = &prod * &p;
                if prod.is_zero() {
                    break;
                }
            }
            for (mm, cc) in prod.terms {
                out.add_term(mm, cc);
            }
        }
        Ok(out)
    }

    /// Substitution on the same table that changes only the listed generators.
    pub fn substitute_partial(&self, images: &BTreeMap<usize, Element>) -> Result<Element> {
        let full: Vec<Element> = (0..self.table.len())
            .map(|i| {
                images
                    .get(&i)
                    .cloned()
                    .unwrap_or_else(|| Element::generator(&self.table, i))
            })
            .collect();
        self.substitute(&full)
    }

    /// Re-expresses `self` over `target`, sending generator `i` to
    /// generator `map[i]`. Degrees must agree.
    pub fn embed(&self, target: &Arc<GeneratorTable>, map: &[usize]) -> Result<Element> {
        let images: Vec<Element> = map.iter().map(|&j| Element::generator(target, j)).collect();
        if images.is_empty() {
            // constants only
            return Ok(Element::from_terms(
                target,
                self.terms.iter().map(|(m, c)| (m.clone(), c.clone())),
            ));
        }
        self.substitute(&images)
    }

    /// Reads `self` over `target` without renaming, which requires every
    /// generator used by `self` to sit at the same index with the same
    /// degree in both tables.
    pub fn reinterpret(&self, target: &Arc<GeneratorTable>) -> Result<Element> {
        for m in self.terms.keys() {
            for (i, _) in m.factors() {
                if i >= target.len() || target.generator(i) != self.table.generator(i) {
                    return Err(Error::MismatchedAlgebra);
                }
            }
        }
        Ok(Element {
            table: target.clone(),
            terms: self.terms.clone(),
        })
    }

    /// True when no generator with index in `range` occurs.
    pub fn avoids(&self, range: std::ops::Range<usize>) -> bool {
        self.terms
            .keys()
            .all(|m| m.factors().all(|(i, _)| !range.contains(&i)))
    }

    /// Evaluates the coefficient-wise rational value when every generator is
    /// replaced by a rational number; only meaningful for even generators.
    pub fn evaluate(&self, values: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, e) in m.factors() {
                t *= num_traits::pow(values[i].clone(), e as usize);
            }
            acc += t;
        }
        acc
    }

    pub fn display(&self) -> String {
        self.to_string()
    }
}

fn check_images(source: &Arc<GeneratorTable>, images: &[Element]) -> Result<Arc<GeneratorTable>> {
    if images.len() != source.len() {
        return Err(Error::Shape(format!(
            "substitution needs {} images, got {}",
            source.len(),
            images.len()
        )));
    }
    let target = images[0].table.clone();
    for (i, img) in images.iter().enumerate() {
        if !same_table(&target, &img.table) {
            return Err(Error::MismatchedAlgebra);
        }
        if img.is_zero() {
            continue;
        }
        if img.degree() != Some(source.degree(i)) {
            return Err(Error::DegreeMismatch(format!(
                "image of `{}` must have degree {}",
                source.name(i),
                source.degree(i)
            )));
        }
    }
    Ok(target)
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", m.display(&self.table))?;
            } else {
                write!(f, "{abs}*{}", m.display(&self.table))?;
            }
        }
        Ok(())
    }
}

impl Add<&Element> for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        self.checked_add(rhs)
            .expect("adding elements of different algebras")
    }
}

impl Add for Element {
    type Output = Element;
    fn add(self, rhs: Element) -> Element {
        &self + &rhs
    }
}

impl Sub<&Element> for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self.checked_sub(rhs)
            .expect("subtracting elements of different algebras")
    }
}

impl Sub for Element {
    type Output = Element;
    fn sub(self, rhs: Element) -> Element {
        &self - &rhs
    }
}

impl Mul<&Element> for &Element {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        self.checked_mul(rhs)
            .expect("multiplying elements of different algebras")
    }
}

impl Mul for Element {
    type Output = Element;
    fn mul(self, rhs: Element) -> Element {
        &self * &rhs
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        Element {
            table: self.table.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Element {
    type Output = Element;
    fn neg(self) -> Element {
        -&self
    }
}

/// Enumerates every monomial of the given degree (and weight, if supplied)
/// in lexicographic order.
///
/// Without a weight every generator must have strictly positive degree. With
/// a weight, all weights must be nonnegative and every generator of degree
/// ≤ 0 must carry a strictly positive weight.
pub fn basis(
    table: &GeneratorTable,
    degree: i64,
    weight: Option<(&WeightAssignment, i64)>,
) -> Result<Vec<Monomial>> {
    let n = table.len();
    let mut max_exp = vec![0u32; n];
    match weight {
        None => {
            if let Some(g) = table.generators().iter().find(|g| g.degree <= 0) {
                return Err(Error::InfiniteBasis(format!(
                    "generator `{}` has degree {} and no weight bounds it",
                    g.name, g.degree
                )));
            }
            for i in 0..n {
                max_exp[i] = cap_odd(table, i, degree.max(0) / table.degree(i));
            }
        }
        Some((w, value)) => {
            if w.0.len() != n {
                return Err(Error::Shape(format!(
                    "weight assignment has {} entries for {} generators",
                    w.0.len(),
                    n
                )));
            }
            for i in 0..n {
                let g = table.generator(i);
                if w.of(i) < 0 {
                    return Err(Error::InfiniteBasis(format!(
                        "generator `{}` has negative weight",
                        g.name
                    )));
                }
                if g.degree <= 0 && w.of(i) == 0 {
                    return Err(Error::InfiniteBasis(format!(
                        "generator `{}` has degree {} and weight 0",
                        g.name, g.degree
                    )));
                }
            }
            if value < 0 {
                return Ok(Vec::new());
            }
            // deg ≤ 0 generators are bounded by weight
            let mut slack = 0i64;
            for i in 0..n {
                if table.degree(i) <= 0 {
                    max_exp[i] = cap_odd(table, i, value / w.of(i));
                    slack += -table.degree(i) * max_exp[i] as i64;
                }
            }
            for i in 0..n {
                if table.degree(i) > 0 {
                    let mut bound = (degree + slack).max(0) / table.degree(i);
                    if w.of(i) > 0 {
                        bound = bound.min(value / w.of(i));
                    }
                    max_exp[i] = cap_odd(table, i, bound);
                }
            }
        }
    }

    // suffix bounds for pruning
    let mut min_deg = vec![0i64; n + 1];
    let mut max_deg = vec![0i64; n + 1];
    for i in (0..n).rev() {
        let span = table.degree(i) * max_exp[i] as i64;
        min_deg[i] = min_deg[i + 1] + span.min(0);
        max_deg[i] = max_deg[i + 1] + span.max(0);
    }

    let mut out = Vec::new();
    let mut exps = vec![0u32; n];
    let weights = weight.map(|(w, v)| (&w.0, v));
    enumerate(
        table, 0, degree, weights, &max_exp, &min_deg, &max_deg, &mut exps, &mut out,
    );
    out.sort();
    Ok(out)
}

fn cap_odd(table: &GeneratorTable, i: usize, bound: i64) -> u32 {
    let b = bound.clamp(0, u32::MAX as i64) as u32;
    if table.is_odd(i) {
        b.min(1)
    } else {
        b
    }
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    table: &GeneratorTable,
    i: usize,
    remaining_degree: i64,
    weight: Option<(&Vec<i64>, i64)>,
    max_exp: &[u32],
    min_deg: &[i64],
    max_deg: &[i64],
    exps: &mut Vec<u32>,
    out: &mut Vec<Monomial>,
) {
    if remaining_degree < min_deg[i] || remaining_degree > max_deg[i] {
        return;
    }
    if let Some((_, w)) = weight {
        if w < 0 {
            return;
        }
    }
    if i == table.len() {
        if remaining_degree == 0 && weight.is_none_or(|(_, w)| w == 0) {
            out.push(Monomial::from_exponents(table, exps).expect("odd exponents capped"));
        }
        return;
    }
    for e in 0..=max_exp[i] {
        exps[i] = e;
        let next_w = weight.map(|(ws, w)| (ws, w - ws[i] * e as i64));
        if let Some((_, w)) = next_w {
            if w < 0 {
                break;
            }
        }
        enumerate(
            table,
            i + 1,
            remaining_degree - table.degree(i) * e as i64,
            next_w,
            max_exp,
            min_deg,
            max_deg,
            exps,
            out,
        );
    }
    exps[i] = 0;
}

/// All monomials of the given degree with word length at most `max_length`,
/// in canonical order. Works for generators of any degree.
pub fn bounded_monomials(table: &GeneratorTable, degree: i64, max_length: u32) -> Vec<Monomial> {
    fn go(
        table: &GeneratorTable,
        i: usize,
        degree: i64,
        left: u32,
        exps: &mut Vec<u32>,
        out: &mut Vec<Monomial>,
    ) {
        if i == table.len() {
            if degree == 0 {
                out.push(Monomial::from_exponents(table, exps).expect("odd exponents capped"));
            }
            return;
        }
        let cap = if table.is_odd(i) { left.min(1) } else { left };
        for e in 0..=cap {
            exps[i] = e;
            go(
                table,
                i + 1,
                degree - table.degree(i) * e as i64,
                left - e,
                exps,
                out,
            );
        }
        exps[i] = 0;
    }
    let mut out = Vec::new();
    let mut exps = vec![0u32; table.len()];
    go(table, 0, degree, max_length, &mut exps, &mut out);
    out.sort();
    out
}

/// Converts a small rational to `f64` for display purposes only.
pub fn approx(c: &Rational) -> f64 {
    c.to_f64().unwrap_or(f64::NAN)
}
