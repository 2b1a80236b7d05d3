//! Cohomology of finite-dimensional slices of a differential graded algebra.
//!
//! A [`ComplexSpec`] fixes a differential, a degree window and optionally a
//! weight. Each degree piece is spanned by the monomials of
//! [`crate::gca::basis`]; an optional family of constraint derivations cuts
//! it down to their joint kernel, which is how basic subcomplexes are
//! handled.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use rayon::prelude::*;

use crate::derivations::Derivation;
use crate::error::{Error, Result};
use crate::gca::{basis, Element, GeneratorTable, Monomial, Rational, WeightAssignment};
use crate::linalg;

#[derive(Clone, Debug)]
pub struct ComplexSpec {
    pub differential: Derivation,
    /// Inclusive degree window.
    pub window: (i64, i64),
    pub weight: Option<(WeightAssignment, i64)>,
    /// Derivations whose joint kernel is the subcomplex of interest.
    pub constraints: Vec<Derivation>,
}

impl ComplexSpec {
    pub fn new(differential: Derivation, window: (i64, i64)) -> Self {
        ComplexSpec {
            differential,
            window,
            weight: None,
            constraints: Vec::new(),
        }
    }

    pub fn with_weight(mut self, weights: WeightAssignment, value: i64) -> Self {
        self.weight = Some((weights, value));
        self
    }

    pub fn with_constraints(mut self, constraints: Vec<Derivation>) -> Self {
        self.constraints = constraints;
        self
    }

    pub fn table(&self) -> &Arc<GeneratorTable> {
        self.differential.table()
    }

    fn weight_ref(&self) -> Option<(&WeightAssignment, i64)> {
        self.weight.as_ref().map(|(w, v)| (w, *v))
    }

    /// Monomial basis of the full cochain space in degree `n`.
    pub fn basis(&self, n: i64) -> Result<Vec<Monomial>> {
        basis(self.table(), n, self.weight_ref())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiRow {
    pub degree: i64,
    /// Dimension of the cochain space (of the subcomplex, if constrained).
    pub dim: usize,
    /// Rank of the outgoing differential.
    pub rank: usize,
    pub kernel: usize,
    pub h: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiTable {
    pub rows: Vec<BettiRow>,
}

impl BettiTable {
    pub fn dims(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.h).collect()
    }
}

impl fmt::Display for BettiTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:>6} {:>6} {:>6} {:>6} {:>4}",
            "degree", "dim", "rank", "kernel", "h"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:>6} {:>6} {:>6} {:>6} {:>4}",
                r.degree, r.dim, r.rank, r.kernel, r.h
            )?;
        }
        Ok(())
    }
}

fn weight_check(d: &Derivation, w: &WeightAssignment, what: &str) -> Result<()> {
    let t = d.table();
    if w.0.len() != t.len() {
        return Err(Error::Shape(format!(
            "weight assignment has {} entries for {} generators",
            w.0.len(),
            t.len()
        )));
    }
    for i in 0..t.len() {
        let ws = w.weights_of(d.image(i));
        if ws.iter().any(|&x| x != w.of(i)) {
            return Err(Error::WeightNotPreserved(format!(
                "{what} sends `{}` (weight {}) to `{}`",
                t.name(i),
                w.of(i),
                d.image(i)
            )));
        }
    }
    Ok(())
}

/// Coordinates of `e` in the basis indexed by `index`.
fn coordinates(e: &Element, index: &HashMap<Monomial, usize>, len: usize) -> Result<Vec<Rational>> {
    let mut v = vec![Rational::zero(); len];
    for (m, c) in e.terms() {
        let &k = index.get(m).ok_or_else(|| {
            Error::WeightNotPreserved(format!(
                "image term `{}` lies outside the expected degree/weight piece",
                m.display(e.table())
            ))
        })?;
        v[k] = c.clone();
    }
    Ok(v)
}

fn element_of(table: &Arc<GeneratorTable>, basis: &[Monomial], v: &[Rational]) -> Element {
    Element::from_terms(
        table,
        basis
            .iter()
            .zip(v)
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (m.clone(), c.clone())),
    )
}

/// Matrix (rows indexed by the target basis) of `d` from degree `n`.
fn operator_matrix(d: &Derivation, source: &[Monomial], target: &[Monomial]) -> Result<Vec<Vec<Rational>>> {
    let t = d.table();
    let index: HashMap<Monomial, usize> = target.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let mut rows = vec![vec![Rational::zero(); source.len()]; target.len()];
    for (j, m) in source.iter().enumerate() {
        let img = d.apply(&Element::monomial(t, m.clone(), Rational::from_integer(1.into())))?;
        let col = coordinates(&img, &index, target.len())?;
        for (i, c) in col.into_iter().enumerate() {
            rows[i][j] = c;
        }
    }
    Ok(rows)
}

/// The matrix of the differential `C^n → C^{n+1}` in the monomial bases of
/// [`ComplexSpec::basis`]; rows index degree `n + 1`.
pub fn differential_matrix(spec: &ComplexSpec, n: i64) -> Result<Vec<Vec<Rational>>> {
    validate(spec)?;
    let d = &spec.differential;
    operator_matrix(d, &spec.basis(n)?, &spec.basis(n + d.degree())?)
}

fn validate(spec: &ComplexSpec) -> Result<()> {
    let d = &spec.differential;
    if d.degree() != 1 {
        return Err(Error::NotHomological(format!(
            "differential has degree {}",
            d.degree()
        )));
    }
    for c in &spec.constraints {
        if !crate::gca::same_table(c.table(), d.table()) {
            return Err(Error::MismatchedAlgebra);
        }
    }
    if let Some((w, _)) = &spec.weight {
        weight_check(d, w, "differential")?;
        for c in &spec.constraints {
            weight_check(c, w, "constraint")?;
        }
    }
    Ok(())
}

/// One degree of a (possibly constrained) complex.
struct Slice {
    basis: Vec<Monomial>,
    /// Spanning vectors of the subspace, in `basis` coordinates.
    sub: Vec<Vec<Rational>>,
    /// Rank of the differential restricted to `sub`.
    rank: usize,
    /// Images of `sub` under the differential, in degree `n + 1` coordinates.
    images: Vec<Vec<Rational>>,
}

fn joint_kernel(spec: &ComplexSpec, n: i64, basis: &[Monomial]) -> Result<Vec<Vec<Rational>>> {
    if spec.constraints.is_empty() {
        return Ok((0..basis.len())
            .map(|i| {
                let mut v = vec![Rational::zero(); basis.len()];
                v[i] = Rational::from_integer(1.into());
                v
            })
            .collect());
    }
    let mut rows = Vec::new();
    for c in &spec.constraints {
        let target = spec.basis(n + c.degree())?;
        rows.extend(operator_matrix(c, basis, &target)?);
    }
    Ok(linalg::kernel(&rows, basis.len()))
}

fn slice(spec: &ComplexSpec, n: i64) -> Result<Slice> {
    let d = &spec.differential;
    let b = spec.basis(n)?;
    let sub = joint_kernel(spec, n, &b)?;
    let next = spec.basis(n + 1)?;
    let m = operator_matrix(d, &b, &next)?;
    let images: Vec<Vec<Rational>> = sub.iter().map(|v| linalg::mat_vec(&m, v)).collect();
    let rank = linalg::rank(&images, next.len());
    let t = spec.table();

    if !spec.constraints.is_empty() {
        // closure of the subspace and D² = 0 on it
        for (v, img) in sub.iter().zip(&images) {
            let e = element_of(t, &next, img);
            for c in &spec.constraints {
                let out = c.apply(&e)?;
                if !out.is_zero() {
                    return Err(Error::NotClosed(format!(
                        "D({}) = {} is not annihilated by a constraint",
                        element_of(t, &b, v),
                        e
                    )));
                }
            }
            let dd = d.apply(&e)?;
            if !dd.is_zero() {
                return Err(Error::NotHomological(format!(
                    "D^2({}) = {}",
                    element_of(t, &b, v),
                    dd
                )));
            }
        }
    }
    Ok(Slice {
        basis: b,
        sub,
        rank,
        images,
    })
}

fn check_global(spec: &ComplexSpec) -> Result<()> {
    if spec.constraints.is_empty() {
        if let Some((g, img)) = spec.differential.square_witness() {
            return Err(Error::NotHomological(format!(
                "D^2({}) = {}",
                spec.table().name(g),
                img
            )));
        }
    }
    Ok(())
}

/// Betti table over the window.
pub fn betti(spec: &ComplexSpec) -> Result<BettiTable> {
    validate(spec)?;
    check_global(spec)?;
    let (lo, hi) = spec.window;
    let slices: Vec<(i64, Slice)> = (lo - 1..=hi)
        .into_par_iter()
        .map(|n| slice(spec, n).map(|s| (n, s)))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for w in slices.windows(2) {
        let (prev, cur) = (&w[0].1, &w[1].1);
        let dim = cur.sub.len();
        let kernel = dim - cur.rank;
        rows.push(BettiRow {
            degree: w[1].0,
            dim,
            rank: cur.rank,
            kernel,
            h: kernel - prev.rank,
        });
    }
    Ok(BettiTable { rows })
}

/// Cohomology of the basic subcomplex: the joint kernel of the contractions
/// `I_b`, the operators `L_b = [I_b, D]` and any constraints already on the
/// spec.
pub fn basic_betti(spec: &ComplexSpec, contractions: &[Derivation]) -> Result<BettiTable> {
    betti(&basic_spec(spec, contractions)?)
}

pub fn basic_spec(spec: &ComplexSpec, contractions: &[Derivation]) -> Result<ComplexSpec> {
    let mut constraints = spec.constraints.clone();
    for i in contractions {
        if i.degree() != -1 {
            return Err(Error::DegreeMismatch(format!(
                "contraction has degree {}, expected -1",
                i.degree()
            )));
        }
        constraints.push(i.clone());
        constraints.push(i.bracket(&spec.differential)?);
    }
    Ok(ComplexSpec {
        constraints,
        ..spec.clone()
    })
}

/// Cocycles representing a basis of `H^n`: kernel vectors are added in
/// pivot order whenever they are independent of the coboundaries and the
/// vectors already chosen.
pub fn representatives(spec: &ComplexSpec, n: i64) -> Result<Vec<Element>> {
    validate(spec)?;
    check_global(spec)?;
    let prev = slice(spec, n - 1)?;
    let cur = slice(spec, n)?;
    let next_len = spec.basis(n + 1)?.len();
    let len = cur.basis.len();
    // cocycles: combinations of `sub` killed by D
    let coeffs = linalg::kernel(&linalg::transpose(&cur.images, next_len), cur.sub.len());
    let cocycles: Vec<Vec<Rational>> = coeffs
        .iter()
        .map(|y| {
            let mut v = vec![Rational::zero(); len];
            for (c, s) in y.iter().zip(&cur.sub) {
                if c.is_zero() {
                    continue;
                }
                for (a, b) in v.iter_mut().zip(s) {
                    *a += c * b;
                }
            }
            v
        })
        .collect();
    let mut span: Vec<Vec<Rational>> = prev.images.clone();
    let mut r = linalg::rank(&span, len);
    let mut out = Vec::new();
    for z in cocycles {
        span.push(z.clone());
        let r2 = linalg::rank(&span, len);
        if r2 > r {
            r = r2;
            out.push(element_of(spec.table(), &cur.basis, &z));
        } else {
            span.pop();
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroids::{build_differential, StructureData};
    use crate::models::weil;

    #[test]
    fn weil_line_matrix() {
        let w = weil(&StructureData::abelian(1)).unwrap();
        let spec = w.complex((0, 3));
        let m = differential_matrix(&spec, 1).unwrap();
        assert_eq!(m, vec![vec![Rational::from_integer(1.into())]]);
    }

    #[test]
    fn so3_ce() {
        let g = StructureData::so3();
        let d = build_differential(&g).unwrap();
        let spec = ComplexSpec::new(d, (0, 3));
        assert_eq!(betti(&spec).unwrap().dims(), vec![1, 0, 0, 1]);
        let reps = representatives(&spec, 3).unwrap();
        assert_eq!(reps.len(), 1);
        assert_eq!(reps[0].to_string(), "θ1*θ2*θ3");
        assert_eq!(representatives(&spec, 0).unwrap()[0], Element::one(spec.table()));
    }

    #[test]
    fn zero_differential() {
        let t = GeneratorTable::new([("θ", 1)]).unwrap();
        let spec = ComplexSpec::new(Derivation::zero(&t, 1), (0, 1));
        assert_eq!(betti(&spec).unwrap().dims(), vec![1, 1]);
        assert!(differential_matrix(&spec, 0).unwrap()[0][0].is_zero());
    }

    #[test]
    fn weil_line_basic() {
        let w = weil(&StructureData::abelian(1)).unwrap();
        let spec = w.complex((0, 6));
        assert_eq!(
            basic_betti(&spec, &w.contractions).unwrap().dims(),
            vec![1, 0, 1, 0, 1, 0, 1]
        );
        let bs = basic_spec(&spec, &w.contractions).unwrap();
        let reps = representatives(&bs, 2).unwrap();
        assert_eq!(reps.len(), 1);
        assert_eq!(reps[0].to_string(), "θ1'");
        assert_eq!(basic_betti(&spec, &[]).unwrap(), betti(&spec).unwrap());
    }

    #[test]
    fn rejects_weight_violation() {
        let t = GeneratorTable::new([("x", 0), ("x'", 1)]).unwrap();
        let x = Element::generator(&t, 0);
        let d = Derivation::from_images(
            &t,
            1,
            std::collections::BTreeMap::from([(0, &x * &Element::generator(&t, 1))]),
        )
        .unwrap();
        let spec = ComplexSpec::new(d, (0, 1)).with_weight(WeightAssignment::new(vec![1, 1]), 1);
        assert!(matches!(betti(&spec), Err(Error::WeightNotPreserved(_))));
    }
}
