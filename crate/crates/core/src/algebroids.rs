//! Lie (super)algebras and polynomial Lie algebroids in local frames.
//!
//! An algebroid is described by base coordinates `x^i`, frame degrees `p_α`,
//! anchor polynomials `ρ_α^i` and structure functions `c_{αβ}^γ`. Its
//! functions live on the algebra generated by the base coordinates followed by
//! fiber coordinates `λ^α` of degree `1 − p_α`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::derivations::Derivation;
use crate::error::{Error, Result};
use crate::gca::{frac, q, Element, GeneratorTable, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureData {
    base: Arc<GeneratorTable>,
    total: Arc<GeneratorTable>,
    frame_degrees: Vec<i64>,
    /// `anchor[α][i] = ρ_α^i`
    anchor: Vec<Vec<Element>>,
    /// `brackets[α][β][γ] = c_{αβ}^γ`
    brackets: Vec<Vec<Vec<Element>>>,
}

fn odd(n: i64) -> bool {
    n.rem_euclid(2) == 1
}

fn check_degree(e: &Element, want: i64, what: impl FnOnce() -> String) -> Result<()> {
    if e.is_zero() || e.degree() == Some(want) {
        Ok(())
    } else {
        Err(Error::DegreeMismatch(format!(
            "{} = `{}` should be homogeneous of degree {}",
            what(),
            e,
            want
        )))
    }
}

impl StructureData {
    /// Validates and packages algebroid data.
    ///
    /// `frames` lists the fiber coordinate names with their frame degrees
    /// `p_α`. Anchor and structure functions must be elements of `base`.
    pub fn new(
        base: &Arc<GeneratorTable>,
        frames: &[(String, i64)],
        anchor: Vec<Vec<Element>>,
        brackets: Vec<Vec<Vec<Element>>>,
    ) -> Result<Self> {
        let n = base.len();
        let r = frames.len();
        let total = GeneratorTable::new(
            base.generators()
                .iter()
                .map(|g| (g.name.clone(), g.degree))
                .chain(frames.iter().map(|(name, p)| (name.clone(), 1 - p))),
        )?;
        if anchor.len() != r || anchor.iter().any(|row| row.len() != n) {
            return Err(Error::Shape(format!("anchor must be {r}×{n}")));
        }
        if brackets.len() != r
            || brackets
                .iter()
                .any(|m| m.len() != r || m.iter().any(|row| row.len() != r))
        {
            return Err(Error::Shape(format!("structure functions must be {r}×{r}×{r}")));
        }
        let p: Vec<i64> = frames.iter().map(|(_, p)| *p).collect();
        let names = |a: usize| frames[a].0.as_str();
        for a in 0..r {
            for i in 0..n {
                let e = &anchor[a][i];
                if !e.is_zero() && !crate::gca::same_table(e.table(), base) {
                    return Err(Error::MismatchedAlgebra);
                }
                check_degree(e, p[a] + base.degree(i), || {
                    format!("anchor of `{}` on `{}`", names(a), base.name(i))
                })?;
            }
            for b in 0..r {
                for c in 0..r {
                    let e = &brackets[a][b][c];
                    if !e.is_zero() && !crate::gca::same_table(e.table(), base) {
                        return Err(Error::MismatchedAlgebra);
                    }
                    check_degree(e, p[a] + p[b] - p[c], || {
                        format!("c[{},{}][{}]", names(a), names(b), names(c))
                    })?;
                    let sign = if odd(p[a] * p[b]) { q(1) } else { q(-1) };
                    if brackets[a][b][c] != brackets[b][a][c].scale(&sign) {
                        return Err(Error::InvalidTable(format!(
                            "structure functions are not graded antisymmetric in ({}, {})",
                            names(a),
                            names(b)
                        )));
                    }
                }
            }
        }
        Ok(StructureData {
            base: base.clone(),
            total,
            frame_degrees: p,
            anchor,
            brackets,
        })
    }

    /// A finite-dimensional Lie algebra (no base, all `p = 0`) from its
    /// nonzero structure constants `c_{ij}^k`, listed for `i < j` only.
    pub fn lie_algebra(names: &[&str], constants: &[((usize, usize, usize), Rational)]) -> Result<Self> {
        let base = GeneratorTable::new(std::iter::empty::<(String, i64)>())?;
        let r = names.len();
        let mut c: Vec<Vec<Vec<Element>>> = vec![vec![vec![Element::zero(&base); r]; r]; r];
        for ((i, j, k), v) in constants {
            if *i >= r || *j >= r || *k >= r || i == j {
                return Err(Error::Shape(format!(
                    "bad structure constant index ({i},{j},{k})"
                )));
            }
            c[*i][*j][*k] = &c[*i][*j][*k] + &Element::scalar(&base, v.clone());
            c[*j][*i][*k] = &c[*j][*i][*k] - &Element::scalar(&base, v.clone());
        }
        let frames: Vec<(String, i64)> = names.iter().map(|n| (n.to_string(), 0)).collect();
        Self::new(&base, &frames, vec![vec![]; r], c)
    }

    /// Dense constant structure tensor `c[i][j][k]` for a Lie algebra with no
    /// base; antisymmetry is checked by [`StructureData::new`].
    pub fn from_constants(names: &[&str], c: &[Vec<Vec<Rational>>]) -> Result<Self> {
        let base = GeneratorTable::new(std::iter::empty::<(String, i64)>())?;
        let brackets = c
            .iter()
            .map(|m| {
                m.iter()
                    .map(|row| row.iter().map(|v| Element::scalar(&base, v.clone())).collect())
                    .collect()
            })
            .collect();
        let frames: Vec<(String, i64)> = names.iter().map(|n| (n.to_string(), 0)).collect();
        Self::new(&base, &frames, vec![vec![]; names.len()], brackets)
    }

    pub fn so3() -> Self {
        Self::lie_algebra(
            &["θ1", "θ2", "θ3"],
            &[((0, 1, 2), q(1)), ((1, 2, 0), q(1)), ((2, 0, 1), q(1))],
        )
        .expect("so(3) data")
    }

    pub fn heisenberg() -> Self {
        Self::lie_algebra(&["θ1", "θ2", "θ3"], &[((0, 1, 2), q(1))]).expect("Heisenberg data")
    }

    pub fn abelian(dim: usize) -> Self {
        let names: Vec<String> = (1..=dim).map(|i| format!("θ{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        Self::lie_algebra(&refs, &[]).expect("abelian data")
    }

    /// The tangent algebroid of a coordinate space: one frame `∂/∂x^i` per
    /// coordinate, anchor the identity, zero bracket.
    pub fn tangent(base: &Arc<GeneratorTable>) -> Result<Self> {
        let n = base.len();
        let frames: Vec<(String, i64)> = base
            .generators()
            .iter()
            .map(|g| (format!("{}'", g.name), -g.degree))
            .collect();
        let anchor = (0..n)
            .map(|a| {
                (0..n)
                    .map(|i| {
                        if a == i {
                            Element::one(base)
                        } else {
                            Element::zero(base)
                        }
                    })
                    .collect()
            })
            .collect();
        let brackets = vec![vec![vec![Element::zero(base); n]; n]; n];
        Self::new(base, &frames, anchor, brackets)
    }

    pub fn base(&self) -> &Arc<GeneratorTable> {
        &self.base
    }

    /// The function algebra: base coordinates followed by fiber coordinates.
    pub fn algebra(&self) -> &Arc<GeneratorTable> {
        &self.total
    }

    pub fn base_len(&self) -> usize {
        self.base.len()
    }

    pub fn rank(&self) -> usize {
        self.frame_degrees.len()
    }

    pub fn frame_degree(&self, a: usize) -> i64 {
        self.frame_degrees[a]
    }

    pub fn frame_degrees(&self) -> &[i64] {
        &self.frame_degrees
    }

    pub fn anchor(&self, a: usize, i: usize) -> &Element {
        &self.anchor[a][i]
    }

    pub fn structure(&self, a: usize, b: usize, c: usize) -> &Element {
        &self.brackets[a][b][c]
    }

    /// Index of the fiber coordinate `λ^α` in [`StructureData::algebra`].
    pub fn fiber_index(&self, a: usize) -> usize {
        self.base.len() + a
    }

    fn lift(&self, e: &Element) -> Element {
        if e.is_zero() {
            return Element::zero(&self.total);
        }
        e.reinterpret(&self.total).expect("base embeds as a prefix")
    }

    fn lambda(&self, a: usize) -> Element {
        Element::generator(&self.total, self.fiber_index(a))
    }

    /// The fiber coordinate contraction `ι_α = ∂/∂λ^α`.
    pub fn frame_contraction(&self, a: usize) -> Derivation {
        Derivation::partial(&self.total, self.fiber_index(a))
    }

    /// True when all anchors and structure functions are constants.
    pub fn is_constant(&self) -> bool {
        self.anchor
            .iter()
            .flatten()
            .chain(self.brackets.iter().flatten().flatten())
            .all(|e| e.terms().all(|(m, _)| m.is_one()))
    }
}

/// `d_A = λ^α ρ_α^i ∂/∂x^i − (−1)^{p_α(p_β−1)} ½ λ^α λ^β c_{αβ}^γ ∂/∂λ^γ`.
pub fn build_differential(s: &StructureData) -> Result<Derivation> {
    let t = s.algebra();
    let n = s.base_len();
    let r = s.rank();
    let mut images = BTreeMap::new();
    for i in 0..n {
        let mut img = Element::zero(t);
        for a in 0..r {
            img = &img + &(&s.lambda(a) * &s.lift(s.anchor(a, i)));
        }
        images.insert(i, img);
    }
    let half = frac(1, 2);
    for c in 0..r {
        let mut img = Element::zero(t);
        for a in 0..r {
            for b in 0..r {
                let coef = s.structure(a, b, c);
                if coef.is_zero() {
                    continue;
                }
                let (pa, pb) = (s.frame_degree(a), s.frame_degree(b));
                let k = if odd(pa * (pb - 1)) {
                    half.clone()
                } else {
                    -half.clone()
                };
                let term = &(&s.lambda(a) * &s.lambda(b)) * &s.lift(coef);
                img = &img + &term.scale(&k);
            }
        }
        images.insert(s.fiber_index(c), img);
    }
    Derivation::from_images(t, 1, images)
}

/// Jacobi identity of the data, decided by `d_A² = 0`.
pub fn check_jacobi(s: &StructureData) -> bool {
    build_differential(s).is_ok_and(|d| d.is_homological())
}

/// Like [`check_jacobi`] but reports the first generator on which `d_A²`
/// does not vanish.
pub fn jacobi_witness(s: &StructureData) -> Result<()> {
    let d = build_differential(s)?;
    match d.square_witness() {
        None => Ok(()),
        Some((g, img)) => Err(Error::JacobiFailure(format!(
            "d^2({}) = {}",
            s.algebra().name(g),
            img
        ))),
    }
}

/// Number of fiber factors in every term, or `None` if the terms disagree.
fn fiber_length(e: &Element, fiber: std::ops::Range<usize>) -> Option<u32> {
    let mut out = None;
    for (m, _) in e.terms() {
        let l: u32 = m
            .factors()
            .filter(|(i, _)| fiber.contains(i))
            .map(|(_, k)| k)
            .sum();
        match out {
            None => out = Some(l),
            Some(prev) if prev != l => return None,
            _ => {}
        }
    }
    out
}

/// Recovers anchor and structure functions from a homological field.
///
/// The first `base_size` generators of `d`'s table are base coordinates and
/// the next `frame_size` are fiber coordinates; frame degrees are read as
/// `1 − |λ^α|`. Anchors are `[ι_α, d](x^i)` and structure functions
/// `[[ι_α, d], ι_β](λ^γ)`.
pub fn extract_structure(d: &Derivation, frame_size: usize, base_size: usize) -> Result<StructureData> {
    let t = d.table();
    if t.len() != frame_size + base_size {
        return Err(Error::Shape(format!(
            "table has {} generators, expected {} base + {} fiber",
            t.len(),
            base_size,
            frame_size
        )));
    }
    if d.degree() != 1 {
        return Err(Error::Shape(format!(
            "field has degree {}, expected 1",
            d.degree()
        )));
    }
    let fiber = base_size..base_size + frame_size;
    for i in 0..t.len() {
        let img = d.image(i);
        if img.is_zero() {
            continue;
        }
        let want = if i < base_size { 1 } else { 2 };
        if fiber_length(img, fiber.clone()) != Some(want) {
            return Err(Error::Shape(format!(
                "image of `{}` is not of fiber degree {}: {}",
                t.name(i),
                want,
                img
            )));
        }
    }
    let base = GeneratorTable::new(
        t.generators()[..base_size]
            .iter()
            .map(|g| (g.name.clone(), g.degree)),
    )?;
    let frames: Vec<(String, i64)> = t.generators()[base_size..]
        .iter()
        .map(|g| (g.name.clone(), 1 - g.degree))
        .collect();
    let down = |e: &Element| -> Result<Element> {
        if e.is_zero() {
            Ok(Element::zero(&base))
        } else if !e.avoids(fiber.clone()) {
            Err(Error::Shape(format!(
                "coefficient `{e}` still depends on fiber coordinates"
            )))
        } else {
            e.reinterpret(&base)
        }
    };
    let iota: Vec<Derivation> = fiber.clone().map(|k| Derivation::partial(t, k)).collect();
    let l: Vec<Derivation> = iota.iter().map(|i| i.bracket(d)).collect::<Result<_>>()?;
    let mut anchor = vec![Vec::with_capacity(base_size); frame_size];
    for a in 0..frame_size {
        for i in 0..base_size {
            anchor[a].push(down(l[a].image(i))?);
        }
    }
    let mut brackets = vec![vec![Vec::with_capacity(frame_size); frame_size]; frame_size];
    for a in 0..frame_size {
        for b in 0..frame_size {
            let lb = l[a].bracket(&iota[b])?;
            for c in 0..frame_size {
                brackets[a][b].push(down(lb.image(base_size + c))?);
            }
        }
    }
    let s = StructureData::new(&base, &frames, anchor, brackets)
        .map_err(|e| Error::Shape(format!("extracted data is inconsistent: {e}")))?;
    let rebuilt = build_differential(&s)?;
    if rebuilt.images() != d.images() {
        return Err(Error::Shape("field is not of algebroid form".into()));
    }
    Ok(s)
}

/// A section `X = f^α X_α` with coefficients over the base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    pub coefficients: Vec<Element>,
}

impl Section {
    pub fn new(coefficients: Vec<Element>) -> Self {
        Section { coefficients }
    }

    pub fn zero(s: &StructureData) -> Self {
        Section {
            coefficients: vec![Element::zero(s.base()); s.rank()],
        }
    }

    /// The frame section `X_α`.
    pub fn frame(s: &StructureData, a: usize) -> Self {
        let mut x = Self::zero(s);
        x.coefficients[a] = Element::one(s.base());
        x
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(Element::is_zero)
    }

    /// Degree `|f^α| + p_α`, or `None` for the zero section.
    pub fn degree(&self, s: &StructureData) -> Result<Option<i64>> {
        let mut deg = None;
        for (a, f) in self.coefficients.iter().enumerate() {
            if let Some(df) = f.degree() {
                let d = df + s.frame_degree(a);
                match deg {
                    None => deg = Some(d),
                    Some(prev) if prev != d => {
                        return Err(Error::DegreeMismatch(format!(
                            "section mixes degrees {prev} and {d}"
                        )))
                    }
                    _ => {}
                }
            } else if !f.is_zero() {
                return Err(Error::DegreeMismatch(format!(
                    "coefficient `{f}` is not homogeneous"
                )));
            }
        }
        Ok(deg)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Section {
            coefficients: self.coefficients.iter().map(|f| f.scale(c)).collect(),
        }
    }

    pub fn add(&self, other: &Section) -> Self {
        Section {
            coefficients: self
                .coefficients
                .iter()
                .zip(&other.coefficients)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// `f·X` for a homogeneous base function `f`.
    pub fn mul_left(&self, f: &Element) -> Self {
        Section {
            coefficients: self.coefficients.iter().map(|g| f * g).collect(),
        }
    }
}

/// `ι_X = f^α ∂/∂λ^α`, of degree `|X| − 1`.
pub fn section_contraction(x: &Section, s: &StructureData) -> Result<Derivation> {
    if x.coefficients.len() != s.rank() {
        return Err(Error::Shape(format!(
            "section has {} coefficients for rank {}",
            x.coefficients.len(),
            s.rank()
        )));
    }
    for f in &x.coefficients {
        if !f.is_zero() && !crate::gca::same_table(f.table(), s.base()) {
            return Err(Error::MismatchedAlgebra);
        }
    }
    let deg = x.degree(s)?.unwrap_or(0);
    let mut images = BTreeMap::new();
    for (a, f) in x.coefficients.iter().enumerate() {
        images.insert(s.fiber_index(a), s.lift(f));
    }
    Derivation::from_images(s.algebra(), deg - 1, images)
}

/// Reads a section back from a field of contraction shape: zero on base
/// coordinates and fiber-independent on fiber coordinates.
pub fn read_contraction(c: &Derivation, s: &StructureData) -> Result<Section> {
    let n = s.base_len();
    let fiber = n..n + s.rank();
    for i in 0..n {
        if !c.image(i).is_zero() {
            return Err(Error::Shape(format!(
                "field moves base coordinate `{}`",
                s.algebra().name(i)
            )));
        }
    }
    let mut coefficients = Vec::with_capacity(s.rank());
    for k in fiber.clone() {
        let img = c.image(k);
        if !img.avoids(fiber.clone()) {
            return Err(Error::Shape(format!(
                "image of `{}` depends on fiber coordinates: {}",
                s.algebra().name(k),
                img
            )));
        }
        coefficients.push(if img.is_zero() {
            Element::zero(s.base())
        } else {
            img.reinterpret(s.base())?
        });
    }
    Ok(Section { coefficients })
}

/// The derived bracket `ι_{[X,Y]} = [[ι_X, d_A], ι_Y]`.
pub fn section_bracket(x: &Section, y: &Section, s: &StructureData) -> Result<Section> {
    let d = build_differential(s)?;
    let ix = section_contraction(x, s)?;
    let iy = section_contraction(y, s)?;
    let c = ix.bracket(&d)?.bracket(&iy)?;
    read_contraction(&c, s)
}

/// The anchor `ρ(X)` as a vector field on the base.
pub fn anchor_field(x: &Section, s: &StructureData) -> Result<Derivation> {
    let d = build_differential(s)?;
    let l = section_contraction(x, s)?.bracket(&d)?;
    let deg = x.degree(s)?.unwrap_or(0);
    let mut images = Vec::with_capacity(s.base_len());
    for i in 0..s.base_len() {
        let img = l.image(i);
        if !img.avoids(s.base_len()..s.algebra().len()) {
            return Err(Error::Shape(format!(
                "anchor of `{}` depends on fibers",
                s.base().name(i)
            )));
        }
        images.push(if img.is_zero() {
            Element::zero(s.base())
        } else {
            img.reinterpret(s.base())?
        });
    }
    Derivation::new(s.base(), deg, images)
}

/// `D_Ξ X`, defined by `ι_{D_Ξ X} = [Ξ, ι_X]` for a morphic field `Ξ`.
pub fn morphic_action(xi: &Derivation, x: &Section, s: &StructureData) -> Result<Section> {
    let d = build_differential(s)?;
    let comm = xi.bracket(&d)?;
    if let Some((g, img)) = comm.images().iter().enumerate().find(|(_, e)| !e.is_zero()) {
        return Err(Error::NotMorphic(format!(
            "[Ξ, d]({}) = {}",
            s.algebra().name(g),
            img
        )));
    }
    let ix = section_contraction(x, s)?;
    read_contraction(&xi.bracket(&ix)?, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn so3_differential() {
        let s = StructureData::so3();
        let d = build_differential(&s).unwrap();
        let t = s.algebra();
        let th = |i| Element::generator(t, i);
        assert_eq!(*d.image(0), -(&th(1) * &th(2)));
        assert!(d.is_homological());
        assert!(check_jacobi(&StructureData::heisenberg()));
        assert!(build_differential(&StructureData::abelian(3)).unwrap().is_zero());
    }

    #[test]
    fn perturbed_so3_breaks_jacobi() {
        // rescaling a cyclic constant still gives a Lie algebra
        let rescaled = StructureData::lie_algebra(
            &["θ1", "θ2", "θ3"],
            &[((0, 1, 2), q(2)), ((1, 2, 0), q(1)), ((2, 0, 1), q(1))],
        )
        .unwrap();
        assert!(check_jacobi(&rescaled));
        let s = StructureData::lie_algebra(
            &["θ1", "θ2", "θ3"],
            &[
                ((0, 1, 2), q(1)),
                ((1, 2, 0), q(1)),
                ((2, 0, 1), q(1)),
                ((0, 1, 0), q(1)),
            ],
        )
        .unwrap();
        assert!(!check_jacobi(&s));
        assert!(matches!(jacobi_witness(&s), Err(Error::JacobiFailure(_))));
    }

    #[test]
    fn tangent_line() {
        let base = GeneratorTable::new([("x", 0)]).unwrap();
        let s = StructureData::tangent(&base).unwrap();
        let d = build_differential(&s).unwrap();
        let t = s.algebra();
        assert_eq!(*d.image(0), Element::generator(t, 1));
        assert!(d.image(1).is_zero());
        assert_eq!(extract_structure(&d, 1, 1).unwrap(), s);
    }

    #[test]
    fn extraction_round_trip() {
        let s = StructureData::so3();
        let d = build_differential(&s).unwrap();
        assert_eq!(extract_structure(&d, 3, 0).unwrap(), s);
        let zero = Derivation::zero(s.algebra(), 1);
        assert_eq!(extract_structure(&zero, 3, 0).unwrap(), StructureData::abelian(3));
    }

    #[test]
    fn extraction_rejects_wrong_shape() {
        let t = GeneratorTable::new([("x", 0), ("y", 1), ("λ", 1)]).unwrap();
        let y = Element::generator(&t, 1);
        let d = Derivation::from_images(&t, 1, BTreeMap::from([(0, y)])).unwrap();
        assert!(matches!(extract_structure(&d, 1, 2), Err(Error::Shape(_))));
        let odd = Derivation::zero(&t, 0);
        assert!(matches!(extract_structure(&odd, 1, 2), Err(Error::Shape(_))));
    }

    #[test]
    fn contraction_examples() {
        let s = StructureData::so3();
        let t = s.algebra();
        let th = |i| Element::generator(t, i);
        let i1 = section_contraction(&Section::frame(&s, 0), &s).unwrap();
        assert_eq!(i1.on(&th(0)), Element::one(t));
        assert!(i1.on(&th(1)).is_zero());
        let i2 = section_contraction(&Section::frame(&s, 1), &s).unwrap();
        assert_eq!(i2.on(&(&th(0) * &th(1))), -th(0));
    }

    #[test]
    fn morphic_examples() {
        let s = StructureData::abelian(2);
        let d = build_differential(&s).unwrap();
        let x = Section::frame(&s, 0);
        assert!(morphic_action(&d, &x, &s).unwrap().is_zero());
        let zero = Derivation::zero(s.algebra(), 0);
        assert!(morphic_action(&zero, &x, &s).unwrap().is_zero());

        let so3 = StructureData::so3();
        let shift = Derivation::partial(so3.algebra(), 0);
        assert!(matches!(
            morphic_action(&shift, &Section::frame(&so3, 0), &so3),
            Err(Error::NotMorphic(_))
        ));
    }

    #[test]
    fn frame_bracket_matches_constants() {
        let s = StructureData::so3();
        let b = section_bracket(&Section::frame(&s, 0), &Section::frame(&s, 1), &s).unwrap();
        assert_eq!(b, Section::frame(&s, 2));
    }
}
