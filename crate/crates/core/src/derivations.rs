//! Graded derivations of a free graded-commutative algebra.
//!
//! A derivation is determined by the images of the generators; everything
//! else follows from the graded Leibniz rule
//! `D(ab) = D(a) b + (-1)^{|D||a|} a D(b)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::One;

use crate::error::{Error, Result};
use crate::gca::{q, same_table, Element, GeneratorTable, Monomial, Rational};

pub const DEFAULT_CAP: usize = 64;

#[derive(Clone, Debug)]
pub struct Derivation {
    table: Arc<GeneratorTable>,
    degree: i64,
    images: Vec<Element>,
}

impl PartialEq for Derivation {
    fn eq(&self, other: &Self) -> bool {
        same_table(&self.table, &other.table) && self.images == other.images
    }
}

impl Eq for Derivation {}

fn parity(n: i64) -> bool {
    n.rem_euclid(2) == 1
}

fn sign(odd: bool) -> Rational {
    if odd {
        -Rational::one()
    } else {
        Rational::one()
    }
}

impl Derivation {
    /// Builds a derivation from one image per generator.
    pub fn new(table: &Arc<GeneratorTable>, degree: i64, images: Vec<Element>) -> Result<Self> {
        if images.len() != table.len() {
            return Err(Error::Shape(format!(
                "derivation needs {} images, got {}",
                table.len(),
                images.len()
            )));
        }
        for (i, img) in images.iter().enumerate() {
            if !same_table(table, img.table()) {
                return Err(Error::MismatchedAlgebra);
            }
            if img.is_zero() {
                continue;
            }
            let want = table.degree(i) + degree;
            if img.degree() != Some(want) {
                return Err(Error::DegreeMismatch(format!(
                    "image of `{}` is `{}`, expected homogeneous degree {}",
                    table.name(i),
                    img,
                    want
                )));
            }
        }
        Ok(Derivation {
            table: table.clone(),
            degree,
            images,
        })
    }

    /// Builds a derivation from the images of some generators; the rest map to zero.
    pub fn from_images(
        table: &Arc<GeneratorTable>,
        degree: i64,
        images: BTreeMap<usize, Element>,
    ) -> Result<Self> {
        let mut full: Vec<Element> = (0..table.len()).map(|_| Element::zero(table)).collect();
        for (i, img) in images {
            if i >= table.len() {
                return Err(Error::Shape(format!("generator index {i} out of range")));
            }
            full[i] = img;
        }
        Self::new(table, degree, full)
    }

    /// Like [`Derivation::from_images`] with generators addressed by name.
    pub fn from_named(table: &Arc<GeneratorTable>, degree: i64, images: &[(&str, Element)]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (name, img) in images {
            let i = table
                .index_of(name)
                .ok_or_else(|| Error::InvalidTable(format!("no generator named `{name}`")))?;
            map.insert(i, img.clone());
        }
        Self::from_images(table, degree, map)
    }

    pub fn zero(table: &Arc<GeneratorTable>, degree: i64) -> Self {
        Derivation {
            table: table.clone(),
            degree,
            images: (0..table.len()).map(|_| Element::zero(table)).collect(),
        }
    }

    /// The coordinate derivation `∂/∂g_i`, of degree `-|g_i|`.
    pub fn partial(table: &Arc<GeneratorTable>, i: usize) -> Self {
        let mut d = Self::zero(table, -table.degree(i));
        d.images[i] = Element::one(table);
        d
    }

    pub fn table(&self) -> &Arc<GeneratorTable> {
        &self.table
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn is_odd(&self) -> bool {
        parity(self.degree)
    }

    pub fn image(&self, i: usize) -> &Element {
        &self.images[i]
    }

    pub fn images(&self) -> &[Element] {
        &self.images
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(Element::is_zero)
    }

    fn check_table(&self, a: &Element) -> Result<()> {
        if same_table(&self.table, a.table()) {
            Ok(())
        } else {
            Err(Error::MismatchedAlgebra)
        }
    }

    fn check_same(&self, other: &Derivation) -> Result<()> {
        if same_table(&self.table, &other.table) {
            Ok(())
        } else {
            Err(Error::MismatchedAlgebra)
        }
    }

    /// Leibniz extension applied to a single monomial.
    fn apply_monomial(&self, m: &Monomial) -> Element {
        let t = &self.table;
        let factors: Vec<(usize, u32)> = m.factors().collect();
        let mut out = Element::zero(t);
        let mut prefix_degree = 0i64;
        for (k, &(g, e)) in factors.iter().enumerate() {
            let img = &self.images[g];
            if !img.is_zero() {
                let mut coef = q(e as i64);
                if self.is_odd() && parity(prefix_degree) {
                    coef = -coef;
                }
                let mut left = factors[..k].to_vec();
                if e > 1 {
                    left.push((g, e - 1));
                }
                let mut exps = vec![0u32; t.len()];
                for &(i, ei) in &left {
                    exps[i] = ei;
                }
                let prefix = Monomial::from_exponents(t, &exps).expect("sub-monomial");
                let mut exps = vec![0u32; t.len()];
                for &(i, ei) in &factors[k + 1..] {
                    exps[i] = ei;
                }
                let suffix = Element::monomial(
                    t,
                    Monomial::from_exponents(t, &exps).expect("sub-monomial"),
                    Rational::one(),
                );
                let middle = img.mul_monomial_left(&prefix, &coef);
                out = &out + &(&middle * &suffix);
            }
            prefix_degree += t.degree(g) * e as i64;
        }
        out
    }

    pub fn apply(&self, a: &Element) -> Result<Element> {
        self.check_table(a)?;
        let mut out = Element::zero(&self.table);
        for (m, c) in a.terms() {
            if m.is_one() {
                continue;
            }
            out = &out + &self.apply_monomial(m).scale(c);
        }
        Ok(out)
    }

    /// Panicking variant of [`Derivation::apply`] for callers that already
    /// know the tables agree.
    pub fn on(&self, a: &Element) -> Element {
        self.apply(a).expect("derivation applied to foreign element")
    }

    /// Graded commutator `[self, other] = self∘other − (−1)^{|self||other|} other∘self`.
    pub fn bracket(&self, other: &Derivation) -> Result<Derivation> {
        self.check_same(other)?;
        let s = sign(self.is_odd() && other.is_odd());
        let images = (0..self.table.len())
            .map(|i| {
                let a = self.on(&other.images[i]);
                let b = other.on(&self.images[i]);
                &a - &b.scale(&s)
            })
            .collect();
        Ok(Derivation {
            table: self.table.clone(),
            degree: self.degree + other.degree,
            images,
        })
    }

    pub fn checked_add(&self, other: &Derivation) -> Result<Derivation> {
        self.check_same(other)?;
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(format!(
                "cannot add derivations of degrees {} and {}",
                self.degree, other.degree
            )));
        }
        Ok(Derivation {
            table: self.table.clone(),
            degree: self.degree,
            images: self
                .images
                .iter()
                .zip(&other.images)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn checked_sub(&self, other: &Derivation) -> Result<Derivation> {
        self.checked_add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Derivation {
        Derivation {
            table: self.table.clone(),
            degree: self.degree,
            images: self.images.iter().map(|a| a.scale(c)).collect(),
        }
    }

    /// The derivation `b ↦ a·D(b)`, of degree `|a| + |D|`.
    pub fn mul_left(&self, a: &Element) -> Result<Derivation> {
        self.check_table(a)?;
        let deg = match a.degree() {
            Some(d) => d,
            None if a.is_zero() => 0,
            None => {
                return Err(Error::DegreeMismatch(format!(
                    "coefficient `{a}` is not homogeneous"
                )))
            }
        };
        Ok(Derivation {
            table: self.table.clone(),
            degree: self.degree + deg,
            images: self.images.iter().map(|img| a * img).collect(),
        })
    }

    /// True iff `|D| = 1` and `[D, D] = 0`.
    pub fn is_homological(&self) -> bool {
        self.degree == 1 && self.bracket(self).map(|b| b.is_zero()).unwrap_or(false)
    }

    /// First generator on which `[D, D]` does not vanish, with its image.
    pub fn square_witness(&self) -> Option<(usize, Element)> {
        let sq = self.bracket(self).ok()?;
        sq.images
            .iter()
            .enumerate()
            .find(|(_, e)| !e.is_zero())
            .map(|(i, e)| (i, e.clone()))
    }

    /// Restricts attention to a subset of generators: images of the others
    /// are replaced by zero.
    pub fn restrict_to(&self, keep: &[usize]) -> Derivation {
        let mut d = Self::zero(&self.table, self.degree);
        for &i in keep {
            d.images[i] = self.images[i].clone();
        }
        d
    }

    /// Transports the derivation along a generator renaming onto `target`,
    /// where `map[i]` is the index in `target` of generator `i`. Target
    /// generators outside the image of `map` are sent to zero.
    pub fn embed(&self, target: &Arc<GeneratorTable>, map: &[usize]) -> Result<Derivation> {
        let mut images: Vec<Element> = (0..target.len()).map(|_| Element::zero(target)).collect();
        for (i, &j) in map.iter().enumerate() {
            images[j] = self.images[i].embed(target, map)?;
        }
        Derivation::new(target, self.degree, images)
    }

    /// The same derivation over a table with identical generators.
    pub fn retable(&self, target: &Arc<GeneratorTable>) -> Result<Derivation> {
        if **target != *self.table {
            return Err(Error::MismatchedAlgebra);
        }
        Ok(Derivation {
            table: target.clone(),
            degree: self.degree,
            images: self
                .images
                .iter()
                .map(|e| e.reinterpret(target))
                .collect::<Result<_>>()?,
        })
    }

    /// Pretty-prints the nonzero generator images, one per line.
    pub fn display(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for (i, img) in self.images.iter().enumerate() {
            if img.is_zero() {
                continue;
            }
            if any {
                writeln!(f)?;
            }
            write!(f, "{} -> {}", self.table.name(i), img)?;
            any = true;
        }
        if !any {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl std::ops::Add<&Derivation> for &Derivation {
    type Output = Derivation;
    fn add(self, rhs: &Derivation) -> Derivation {
        self.checked_add(rhs).expect("incompatible derivations")
    }
}

impl std::ops::Sub<&Derivation> for &Derivation {
    type Output = Derivation;
    fn sub(self, rhs: &Derivation) -> Derivation {
        self.checked_sub(rhs).expect("incompatible derivations")
    }
}

impl std::ops::Neg for &Derivation {
    type Output = Derivation;
    fn neg(self) -> Derivation {
        self.scale(&-Rational::one())
    }
}

/// `Σ_k N^k(a)/k!`, stopping once a term vanishes.
pub fn exp_nilpotent(n: &Derivation, a: &Element, cap: usize) -> Result<Element> {
    if n.degree() != 0 {
        return Err(Error::DegreeMismatch(format!(
            "exponential needs a degree 0 derivation, got degree {}",
            n.degree()
        )));
    }
    let mut term = a.clone();
    let mut acc = a.clone();
    for k in 1..=cap {
        term = n.apply(&term)?.scale(&Rational::new(1.into(), (k as i64).into()));
        if term.is_zero() {
            return Ok(acc);
        }
        acc = &acc + &term;
    }
    Err(Error::NotNilpotent { cap })
}

/// `Ad_{exp N}(D) = Σ_k ad_N^k(D)/k!`.
pub fn conjugate(d: &Derivation, n: &Derivation, cap: usize) -> Result<Derivation> {
    if n.degree() != 0 {
        return Err(Error::DegreeMismatch(format!(
            "conjugation needs a degree 0 derivation, got degree {}",
            n.degree()
        )));
    }
    let mut term = d.clone();
    let mut acc = d.clone();
    for k in 1..=cap {
        term = n
            .bracket(&term)?
            .scale(&Rational::new(1.into(), (k as i64).into()));
        if term.is_zero() {
            return Ok(acc);
        }
        acc = acc.checked_add(&term)?;
    }
    Err(Error::NotNilpotent { cap })
}

/// Images of the generators under the automorphism `exp N`.
pub fn exp_images(n: &Derivation, cap: usize) -> Result<Vec<Element>> {
    (0..n.table().len())
        .map(|i| exp_nilpotent(n, &Element::generator(n.table(), i), cap))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(gens: &[(&str, i64)]) -> Arc<GeneratorTable> {
        GeneratorTable::new(gens.iter().map(|&(n, d)| (n, d))).unwrap()
    }

    fn de_rham_line() -> (Arc<GeneratorTable>, Derivation) {
        let t = table(&[("x", 0), ("x'", 1)]);
        let d = Derivation::from_images(&t, 1, BTreeMap::from([(0, Element::generator(&t, 1))])).unwrap();
        (t, d)
    }

    #[test]
    fn apply_examples() {
        let (t, d) = de_rham_line();
        let x = Element::generator(&t, 0);
        let xd = Element::generator(&t, 1);
        assert_eq!(d.on(&x.pow(2)), (&x * &xd).scale(&q(2)));
        assert!(d.on(&Element::one(&t)).is_zero());

        let w = table(&[("θ1", 1), ("θ2", 1), ("θ1'", 2), ("θ2'", 2)]);
        let dk = Derivation::from_images(
            &w,
            1,
            BTreeMap::from([(0, Element::generator(&w, 2)), (1, Element::generator(&w, 3))]),
        )
        .unwrap();
        let a = &Element::generator(&w, 0) * &Element::generator(&w, 3);
        assert_eq!(dk.on(&a), &Element::generator(&w, 2) * &Element::generator(&w, 3));
    }

    #[test]
    fn bracket_examples() {
        let t = table(&[("x", 0)]);
        let dx = Derivation::partial(&t, 0);
        let euler = dx.mul_left(&Element::generator(&t, 0)).unwrap();
        assert_eq!(dx.bracket(&euler).unwrap(), dx);
        let (_, d) = de_rham_line();
        assert!(d.bracket(&d).unwrap().is_zero());
        assert!(d.is_homological());
    }

    #[test]
    fn rejects_bad_degrees() {
        let t = table(&[("x", 0), ("x'", 1)]);
        let bad = Derivation::from_images(&t, 1, BTreeMap::from([(0, Element::generator(&t, 0))]));
        assert!(matches!(bad, Err(Error::DegreeMismatch(_))));
    }

    #[test]
    fn exp_examples() {
        let (t, d) = de_rham_line();
        let x = Element::generator(&t, 0);
        let n = Derivation::from_images(&t, 0, BTreeMap::from([(0, Element::generator(&t, 0))])).unwrap();
        assert!(matches!(
            exp_nilpotent(&n, &x, 8),
            Err(Error::NotNilpotent { cap: 8 })
        ));
        let zero = Derivation::zero(&t, 0);
        assert_eq!(exp_nilpotent(&zero, &x, DEFAULT_CAP).unwrap(), x);
        assert_eq!(conjugate(&d, &zero, DEFAULT_CAP).unwrap(), d);
        assert!(exp_nilpotent(&d, &x, 4).is_err());

        let s = table(&[("x", 0), ("y", 0)]);
        let shift = Derivation::from_images(&s, 0, BTreeMap::from([(0, Element::generator(&s, 1))])).unwrap();
        let out = exp_nilpotent(&shift, &Element::generator(&s, 0), DEFAULT_CAP).unwrap();
        assert_eq!(out, &Element::generator(&s, 0) + &Element::generator(&s, 1));
    }
}
