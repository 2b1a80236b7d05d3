//! Named differentials and complexes assembled from the Cartan calculus:
//! the Weil algebra, the BRST model of a Lie algebra action, its Cartan
//! model, the Mathai–Quillen–Kalkman conjugation, Lie bialgebra doubles,
//! the Ginzburg differential of an algebroid with a pre-moment and twisted
//! algebroid differentials.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use crate::algebroids::{
    build_differential, jacobi_witness, section_bracket, section_contraction, Section, StructureData,
};
use crate::cartan::{odd_tangent, OddTangent};
use crate::cohomology::ComplexSpec;
use crate::derivations::{conjugate, Derivation, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::gca::{frac, q, Element, GeneratorTable, Rational, WeightAssignment};

/// Value of a constant structure function.
fn constant(e: &Element) -> Result<Rational> {
    let mut out = Rational::zero();
    for (m, c) in e.terms() {
        if !m.is_one() {
            return Err(Error::Shape(format!("structure function `{e}` is not constant")));
        }
        out = c.clone();
    }
    Ok(out)
}

/// Constant structure tensor `c[i][j][k]` of a Lie algebra.
pub fn structure_constants(g: &StructureData) -> Result<Vec<Vec<Vec<Rational>>>> {
    let r = g.rank();
    let mut c = vec![vec![vec![Rational::zero(); r]; r]; r];
    for (i, ci) in c.iter_mut().enumerate() {
        for (j, cij) in ci.iter_mut().enumerate() {
            for (k, v) in cij.iter_mut().enumerate() {
                *v = constant(g.structure(i, j, k))?;
            }
        }
    }
    Ok(c)
}

fn require_lie_algebra(g: &StructureData) -> Result<Vec<Vec<Vec<Rational>>>> {
    if g.base_len() != 0 || g.frame_degrees().iter().any(|&p| p != 0) {
        return Err(Error::Shape(
            "expected an ordinary Lie algebra (no base, p = 0)".into(),
        ));
    }
    jacobi_witness(g)?;
    structure_constants(g)
}

/// `−½ c_{ij}^k θ^iθ^j ∂/∂θ^k − c_{ij}^k θ^i θ̇^j ∂/∂θ̇^k` on any table,
/// given the positions of `θ` and `θ̇`.
fn tangent_lie_differential(
    c: &[Vec<Vec<Rational>>],
    table: &Arc<GeneratorTable>,
    theta: &[usize],
    theta_dot: &[usize],
) -> Result<Derivation> {
    let r = c.len();
    let g = |i| Element::generator(table, i);
    let mut images = BTreeMap::new();
    for k in 0..r {
        let mut a = Element::zero(table);
        let mut b = Element::zero(table);
        for i in 0..r {
            for j in 0..r {
                let v = &c[i][j][k];
                if v.is_zero() {
                    continue;
                }
                a = &a - &(&g(theta[i]) * &g(theta[j])).scale(&(v * frac(1, 2)));
                if !theta_dot.is_empty() {
                    b = &b - &(&g(theta[i]) * &g(theta_dot[j])).scale(v);
                }
            }
        }
        images.insert(theta[k], a);
        if !theta_dot.is_empty() {
            images.insert(theta_dot[k], b);
        }
    }
    Derivation::from_images(table, 1, images)
}

/// `θ ↦ θ̇` on the listed positions.
fn koszul(table: &Arc<GeneratorTable>, theta: &[usize], theta_dot: &[usize]) -> Result<Derivation> {
    let images = theta
        .iter()
        .zip(theta_dot)
        .map(|(&t, &td)| (t, Element::generator(table, td)))
        .collect();
    Derivation::from_images(table, 1, images)
}

/// `−θ̇^j c_{ij}^k ∂/∂θ̇^k`, the coadjoint part of the invariance operators.
fn coadjoint(
    c: &[Vec<Vec<Rational>>],
    i: usize,
    table: &Arc<GeneratorTable>,
    theta_dot: &[usize],
) -> Result<Derivation> {
    let r = c.len();
    let mut images = BTreeMap::new();
    for k in 0..r {
        let mut img = Element::zero(table);
        for j in 0..r {
            img = &img - &Element::generator(table, theta_dot[j]).scale(&c[i][j][k]);
        }
        images.insert(theta_dot[k], img);
    }
    Derivation::from_images(table, 0, images)
}

fn sum(
    ds: impl IntoIterator<Item = Derivation>,
    table: &Arc<GeneratorTable>,
    degree: i64,
) -> Result<Derivation> {
    ds.into_iter()
        .try_fold(Derivation::zero(table, degree), |acc, d| acc.checked_add(&d))
}

fn assert_homological(name: &str, d: &Derivation) -> Result<()> {
    match d.square_witness() {
        None if d.degree() == 1 => Ok(()),
        None => Err(Error::NotHomological(format!("{name} has degree {}", d.degree()))),
        Some((g, img)) => Err(Error::NotHomological(format!(
            "{name}^2({}) = {}",
            d.table().name(g),
            img
        ))),
    }
}

#[derive(Clone, Debug)]
pub struct WeilAlgebra {
    pub g: StructureData,
    pub tangent: OddTangent,
    pub d_k: Derivation,
    pub d_tg: Derivation,
    pub d_w: Derivation,
    /// `I_{v_i} = ∂/∂θ^i`
    pub contractions: Vec<Derivation>,
}

impl WeilAlgebra {
    pub fn table(&self) -> &Arc<GeneratorTable> {
        self.tangent.table()
    }

    pub fn rank(&self) -> usize {
        self.g.rank()
    }

    /// `L_{v_i} = [I_{v_i}, d_W]`.
    pub fn lie_operators(&self) -> Result<Vec<Derivation>> {
        self.contractions.iter().map(|i| i.bracket(&self.d_w)).collect()
    }

    pub fn complex(&self, window: (i64, i64)) -> ComplexSpec {
        ComplexSpec::new(self.d_w.clone(), window)
    }
}

/// The Weil algebra `Λ𝔤* ⊗ Sym 𝔤*` with `d_W = d_{[-1]T𝔤} + d_K`.
pub fn weil(g: &StructureData) -> Result<WeilAlgebra> {
    let c = require_lie_algebra(g)?;
    let tangent = odd_tangent(g.algebra())?;
    let r = g.rank();
    let theta: Vec<usize> = (0..r).collect();
    let theta_dot: Vec<usize> = (r..2 * r).collect();
    let table = tangent.table().clone();
    let d_k = tangent.d().clone();
    let d_tg = tangent_lie_differential(&c, &table, &theta, &theta_dot)?;
    let d_w = d_tg.checked_add(&d_k)?;
    assert_homological("d_W", &d_w)?;
    let contractions = theta.iter().map(|&i| Derivation::partial(&table, i)).collect();
    Ok(WeilAlgebra {
        g: g.clone(),
        tangent,
        d_k,
        d_tg,
        d_w,
        contractions,
    })
}

/// A Lie algebra acting on a coordinate space by polynomial vector fields.
#[derive(Clone, Debug)]
pub struct BrstComplex {
    pub g: StructureData,
    pub constants: Vec<Vec<Vec<Rational>>>,
    /// Coordinates of the manifold.
    pub manifold: Arc<GeneratorTable>,
    /// `ρ(v_i)` as derivations of the manifold coordinates.
    pub action: Vec<Derivation>,
    /// Odd tangent of `[-1](M × 𝔤)`: `x`, `θ`, `ẋ`, `θ̇`.
    pub tangent: OddTangent,
    pub d_m: Derivation,
    pub d_w: Derivation,
    pub d_b: Derivation,
}

impl BrstComplex {
    pub fn table(&self) -> &Arc<GeneratorTable> {
        self.tangent.table()
    }

    pub fn dim(&self) -> usize {
        self.manifold.len()
    }

    pub fn rank(&self) -> usize {
        self.g.rank()
    }

    pub fn x(&self, i: usize) -> usize {
        i
    }

    pub fn theta(&self, a: usize) -> usize {
        self.dim() + a
    }

    pub fn x_dot(&self, i: usize) -> usize {
        self.dim() + self.rank() + i
    }

    pub fn theta_dot(&self, a: usize) -> usize {
        2 * self.dim() + self.rank() + a
    }

    /// `w(x) = w(ẋ) = 1`, `w(θ) = w(θ̇) = 0`.
    pub fn weights(&self) -> WeightAssignment {
        let (n, r) = (self.dim(), self.rank());
        WeightAssignment::new(
            std::iter::repeat_n(1, n)
                .chain(std::iter::repeat_n(0, r))
                .chain(std::iter::repeat_n(1, n))
                .chain(std::iter::repeat_n(0, r))
                .collect(),
        )
    }

    /// The action algebroid `M × 𝔤` with anchor `ρ`.
    pub fn action_algebroid(&self) -> Result<StructureData> {
        action_algebroid(&self.g, &self.manifold, &self.action)
    }

    /// The action vector field `ρ(v_i)` extended by zero to `M × 𝔤`.
    fn extended_field(&self, i: usize) -> Result<Derivation> {
        let p = self.tangent.base();
        let map: Vec<usize> = (0..self.dim()).collect();
        let mut images: Vec<Element> = (0..p.len()).map(|_| Element::zero(p)).collect();
        for (k, &j) in map.iter().enumerate() {
            images[j] = self.action[i].image(k).embed(p, &map)?;
        }
        Derivation::new(p, self.action[i].degree(), images)
    }

    /// `𝓛_{ρ(v_i)}` and `ι_{ρ(v_i)}` on the BRST algebra.
    pub fn action_operators(&self, i: usize) -> Result<(Derivation, Derivation)> {
        let f = self.extended_field(i)?;
        Ok((self.tangent.lie_derivative(&f)?, self.tangent.contraction(&f)?))
    }

    /// `I_i = ∂/∂θ^i`.
    pub fn contractions(&self) -> Vec<Derivation> {
        (0..self.rank())
            .map(|a| Derivation::partial(self.table(), self.theta(a)))
            .collect()
    }

    pub fn complex(&self, window: (i64, i64), weight: Option<i64>) -> ComplexSpec {
        let spec = ComplexSpec::new(self.d_b.clone(), window);
        match weight {
            Some(w) => spec.with_weight(self.weights(), w),
            None => spec,
        }
    }
}

/// Checks `[ρ_i, ρ_j] = c_{ij}^k ρ_k`.
pub fn check_action(c: &[Vec<Vec<Rational>>], action: &[Derivation]) -> Result<()> {
    let r = c.len();
    if action.len() != r {
        return Err(Error::Shape(format!(
            "{} action fields for rank {r}",
            action.len()
        )));
    }
    for i in 0..r {
        for j in i + 1..r {
            let lhs = action[i].bracket(&action[j])?;
            let mut rhs = Derivation::zero(action[i].table(), 0);
            for k in 0..r {
                rhs = rhs.checked_add(&action[k].scale(&c[i][j][k]))?;
            }
            if lhs != rhs {
                return Err(Error::NotAnAction { i, j });
            }
        }
    }
    Ok(())
}

/// The action algebroid with frames named after `g`'s generators.
pub fn action_algebroid(
    g: &StructureData,
    manifold: &Arc<GeneratorTable>,
    action: &[Derivation],
) -> Result<StructureData> {
    let c = structure_constants(g)?;
    let r = g.rank();
    let frames: Vec<(String, i64)> = (0..r).map(|a| (g.algebra().name(a).to_string(), 0)).collect();
    let anchor = action.iter().map(|f| f.images().to_vec()).collect();
    let brackets = c
        .iter()
        .map(|ci| {
            ci.iter()
                .map(|cij| cij.iter().map(|v| Element::scalar(manifold, v.clone())).collect())
                .collect()
        })
        .collect();
    StructureData::new(manifold, &frames, anchor, brackets)
}

/// `D_B = d_M + d_W + θ^i 𝓛_{ρ(v_i)} − θ̇^i ι_{ρ(v_i)}`.
pub fn brst(g: &StructureData, manifold: &Arc<GeneratorTable>, action: &[Derivation]) -> Result<BrstComplex> {
    let c = require_lie_algebra(g)?;
    if manifold.generators().iter().any(|x| x.degree != 0) {
        return Err(Error::DegreeMismatch(
            "manifold coordinates must have degree 0".into(),
        ));
    }
    for f in action {
        if !crate::gca::same_table(f.table(), manifold) {
            return Err(Error::MismatchedAlgebra);
        }
        if !f.is_zero() && f.degree() != 0 {
            return Err(Error::DegreeMismatch("action fields must have degree 0".into()));
        }
    }
    check_action(&c, action)?;
    let product = action_algebroid(g, manifold, action)?;
    let tangent = odd_tangent(product.algebra())?;
    let table = tangent.table().clone();
    let (n, r) = (manifold.len(), g.rank());
    let theta: Vec<usize> = (n..n + r).collect();
    let x_dot: Vec<usize> = (n + r..2 * n + r).collect();
    let theta_dot: Vec<usize> = (2 * n + r..2 * n + 2 * r).collect();
    let x: Vec<usize> = (0..n).collect();

    let d_m = koszul(&table, &x, &x_dot)?;
    let d_w = tangent_lie_differential(&c, &table, &theta, &theta_dot)?
        .checked_add(&koszul(&table, &theta, &theta_dot)?)?;
    let mut b = BrstComplex {
        g: g.clone(),
        constants: c,
        manifold: manifold.clone(),
        action: action.to_vec(),
        tangent,
        d_m: d_m.clone(),
        d_w: d_w.clone(),
        d_b: Derivation::zero(&table, 1),
    };
    let mut parts = vec![d_m, d_w];
    for a in 0..r {
        let (l, i) = b.action_operators(a)?;
        parts.push(l.mul_left(&Element::generator(&table, theta[a]))?);
        parts.push(
            i.mul_left(&Element::generator(&table, theta_dot[a]))?
                .scale(&q(-1)),
        );
    }
    b.d_b = sum(parts, &table, 1)?;
    assert_homological("D_B", &b.d_b)?;
    Ok(b)
}

/// Both sides of the MQK identity: `Ad_{exp ι_{d_A}}(d)` and `d + 𝓛_{d_A}`
/// on the odd tangent of `[-1]A`.
pub fn mqk_structure(s: &StructureData) -> Result<(Derivation, Derivation)> {
    let d_a = build_differential(s)?;
    assert_homological("d_A", &d_a)?;
    let t = odd_tangent(s.algebra())?;
    let n = t.contraction(&d_a)?;
    let lhs = conjugate(t.d(), &n, DEFAULT_CAP)?;
    let rhs = t.d().checked_add(&t.lie_derivative(&d_a)?)?;
    Ok((lhs, rhs))
}

/// [`mqk_structure`] for the action algebroid of a BRST complex. The result
/// lives on the BRST table, so the expected side can be compared to `D_B`.
pub fn mqk(b: &BrstComplex) -> Result<(Derivation, Derivation)> {
    let (lhs, rhs) = mqk_structure(&b.action_algebroid()?)?;
    Ok((lhs.retable(b.table())?, rhs.retable(b.table())?))
}

/// The Cartan model: the `θ`-free subalgebra with its invariance operators
/// and `d_C`.
#[derive(Clone, Debug)]
pub struct CartanModel {
    /// `x`, `ẋ`, `θ̇`
    pub table: Arc<GeneratorTable>,
    pub d_c: Derivation,
    /// `L_{X_i} = −θ̇^j c_{ij}^k ∂/∂θ̇^k + 𝓛_{ρ(v_i)}`
    pub invariance: Vec<Derivation>,
    /// Position of each generator in the BRST table.
    pub embedding: Vec<usize>,
    pub weights: WeightAssignment,
}

impl CartanModel {
    pub fn complex(&self, window: (i64, i64), weight: Option<i64>) -> ComplexSpec {
        let spec = ComplexSpec::new(self.d_c.clone(), window).with_constraints(self.invariance.clone());
        match weight {
            Some(w) => spec.with_weight(self.weights.clone(), w),
            None => spec,
        }
    }
}

/// Builds the Cartan model `d_C = d_M − θ̇^i ι_{ρ(v_i)}` of a BRST complex.
pub fn cartan_model(b: &BrstComplex) -> Result<CartanModel> {
    let (n, r) = (b.dim(), b.rank());
    let forms = odd_tangent(&b.manifold)?;
    let table = GeneratorTable::new(
        forms
            .table()
            .generators()
            .iter()
            .map(|g| (g.name.clone(), g.degree))
            .chain((0..r).map(|a| {
                let g = b.table().generator(b.theta_dot(a));
                (g.name.clone(), g.degree)
            })),
    )?;
    let omega_map: Vec<usize> = (0..2 * n).collect();
    let theta_dot: Vec<usize> = (2 * n..2 * n + r).collect();
    let d_m = forms.d().embed(&table, &omega_map)?;
    let mut d_c = d_m;
    let mut invariance = Vec::with_capacity(r);
    for a in 0..r {
        let iota = forms.contraction(&b.action[a])?.embed(&table, &omega_map)?;
        let lie = forms.lie_derivative(&b.action[a])?.embed(&table, &omega_map)?;
        d_c = d_c.checked_sub(&iota.mul_left(&Element::generator(&table, theta_dot[a]))?)?;
        invariance.push(coadjoint(&b.constants, a, &table, &theta_dot)?.checked_add(&lie)?);
    }
    let embedding = (0..n)
        .map(|i| b.x(i))
        .chain((0..n).map(|i| b.x_dot(i)))
        .chain((0..r).map(|a| b.theta_dot(a)))
        .collect();
    let weights = WeightAssignment::new(
        std::iter::repeat_n(1, 2 * n)
            .chain(std::iter::repeat_n(0, r))
            .collect(),
    );
    Ok(CartanModel {
        table,
        d_c,
        invariance,
        embedding,
        weights,
    })
}

/// The Lie bialgebra double: `v_i` then `θ^i`, all of degree 1.
#[derive(Clone, Debug)]
pub struct BialgebraDouble {
    pub table: Arc<GeneratorTable>,
    pub d: Derivation,
    pub xi: Derivation,
    pub compatible: bool,
    pub total_homological: bool,
    /// First generator where `[d, Ξ]` does not vanish.
    pub witness: Option<String>,
}

/// Builds `d` from the bracket constants `c_{ij}^k` and `Ξ` from the
/// cobracket constants `γ^{ij}_k` (indexed `gamma[i][j][k]`).
pub fn bialgebra_double(c: &[Vec<Vec<Rational>>], gamma: &[Vec<Vec<Rational>>]) -> Result<BialgebraDouble> {
    let r = c.len();
    if gamma.len() != r {
        return Err(Error::Shape(
            "bracket and cobracket have different dimensions".into(),
        ));
    }
    let names: Vec<String> = (1..=r).map(|i| format!("e{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    jacobi_witness(&StructureData::from_constants(&refs, c)?)
        .map_err(|e| Error::JacobiFailure(format!("bracket: {e}")))?;
    jacobi_witness(&StructureData::from_constants(&refs, gamma)?)
        .map_err(|e| Error::JacobiFailure(format!("cobracket: {e}")))?;

    let table = GeneratorTable::new(
        (1..=r)
            .map(|i| (format!("v{i}"), 1))
            .chain((1..=r).map(|i| (format!("θ{i}"), 1))),
    )?;
    let v = |i: usize| Element::generator(&table, i);
    let th = |i: usize| Element::generator(&table, r + i);
    let half = frac(1, 2);
    let mut d_images = BTreeMap::new();
    let mut xi_images = BTreeMap::new();
    for j in 0..r {
        // d(v_j) = θ^i c_ij^k v_k ; Ξ(θ^j) = v_i γ^{ij}_k θ^k
        let mut dv = Element::zero(&table);
        let mut xt = Element::zero(&table);
        for i in 0..r {
            for k in 0..r {
                dv = &dv + &(&th(i) * &v(k)).scale(&c[i][j][k]);
                xt = &xt + &(&v(i) * &th(k)).scale(&gamma[i][j][k]);
            }
        }
        d_images.insert(j, dv);
        xi_images.insert(r + j, xt);
    }
    for k in 0..r {
        let mut dt = Element::zero(&table);
        let mut xv = Element::zero(&table);
        for i in 0..r {
            for j in 0..r {
                dt = &dt - &(&th(i) * &th(j)).scale(&(&c[i][j][k] * &half));
                xv = &xv - &(&v(i) * &v(j)).scale(&(&gamma[i][j][k] * &half));
            }
        }
        d_images.insert(r + k, dt);
        xi_images.insert(k, xv);
    }
    let d = Derivation::from_images(&table, 1, d_images)?;
    let xi = Derivation::from_images(&table, 1, xi_images)?;
    assert_homological("d", &d)?;
    assert_homological("Ξ", &xi)?;
    let comm = d.bracket(&xi)?;
    let witness = comm
        .images()
        .iter()
        .enumerate()
        .find(|(_, e)| !e.is_zero())
        .map(|(g, e)| format!("[d,Ξ]({}) = {}", table.name(g), e));
    let total_homological = d.checked_add(&xi)?.is_homological();
    Ok(BialgebraDouble {
        table,
        d,
        xi,
        compatible: witness.is_none(),
        total_homological,
        witness,
    })
}

/// The Ginzburg construction for an algebroid `A` with a Lie algebra `𝔤`
/// acting through a pre-moment `ã`.
#[derive(Clone, Debug)]
pub struct GinzburgModel {
    /// `[-1]A` generators, then `θ`, then `θ̇`.
    pub table: Arc<GeneratorTable>,
    /// `θ^b 𝓛_{ã(v_b)} − θ̇^b ι_{ã(v_b)} + d_{[-1]T𝔤}`
    pub algebroid_part: Derivation,
    /// `algebroid_part + d_A + d_K`
    pub total: Derivation,
    /// `d_A + d_K` on the same table
    pub untwisted: Derivation,
    /// `Q = θ^b ι_{ã(v_b)} − ½θ^aθ^b c_{ab}^e ∂/∂θ̇^e`
    pub q: Derivation,
    /// The `θ`-free table: `[-1]A` generators then `θ̇`.
    pub basic_table: Arc<GeneratorTable>,
    /// `d_C = d_A − θ̇^b ι_{ã(v_b)}` on the basic table.
    pub d_c: Derivation,
    /// `−θ̇^j c_{bj}^k ∂/∂θ̇^k + 𝓛_{ã(v_b)}` on the basic table.
    pub invariance: Vec<Derivation>,
    pub basic_embedding: Vec<usize>,
    algebroid_len: usize,
}

impl GinzburgModel {
    /// Weight 1 on the `[-1]A` generators and 0 on `θ̇`.
    pub fn basic_weights(&self) -> WeightAssignment {
        let r = self.basic_table.len() - self.algebroid_len;
        WeightAssignment::new(
            std::iter::repeat_n(1, self.algebroid_len)
                .chain(std::iter::repeat_n(0, r))
                .collect(),
        )
    }

    pub fn basic_complex(&self, window: (i64, i64), weight: Option<i64>) -> ComplexSpec {
        let spec = ComplexSpec::new(self.d_c.clone(), window).with_constraints(self.invariance.clone());
        match weight {
            Some(w) => spec.with_weight(self.basic_weights(), w),
            None => spec,
        }
    }
}

/// Checks `[ã(v_a), ã(v_b)] = c_{ab}^e ã(v_e)`.
pub fn check_premoment(s: &StructureData, c: &[Vec<Vec<Rational>>], premoment: &[Section]) -> Result<()> {
    let r = c.len();
    if premoment.len() != r {
        return Err(Error::Shape(format!(
            "{} pre-moment sections for rank {r}",
            premoment.len()
        )));
    }
    for a in 0..r {
        for b in a + 1..r {
            let lhs = section_bracket(&premoment[a], &premoment[b], s)?;
            let mut rhs = Section::zero(s);
            for e in 0..r {
                rhs = rhs.add(&premoment[e].scale(&c[a][b][e]));
            }
            if lhs != rhs {
                return Err(Error::NotAnAction { i: a, j: b });
            }
        }
    }
    Ok(())
}

pub fn ginzburg(s: &StructureData, g: &StructureData, premoment: &[Section]) -> Result<GinzburgModel> {
    let c = require_lie_algebra(g)?;
    let d_a = build_differential(s)?;
    assert_homological("d_A", &d_a)?;
    check_premoment(s, &c, premoment)?;
    for x in premoment {
        if x.degree(s)?.is_some_and(|d| d != 0) {
            return Err(Error::DegreeMismatch(
                "pre-moment sections must have degree 0".into(),
            ));
        }
    }
    let a = s.algebra();
    let m = a.len();
    let r = g.rank();
    let tg = odd_tangent(g.algebra())?;
    let table = GeneratorTable::new(
        a.generators()
            .iter()
            .chain(tg.table().generators())
            .map(|x| (x.name.clone(), x.degree)),
    )?;
    let a_map: Vec<usize> = (0..m).collect();
    let theta: Vec<usize> = (m..m + r).collect();
    let theta_dot: Vec<usize> = (m + r..m + 2 * r).collect();

    let d_tg = tangent_lie_differential(&c, &table, &theta, &theta_dot)?;
    let d_k = koszul(&table, &theta, &theta_dot)?;
    let d_a_big = d_a.embed(&table, &a_map)?;

    let mut parts = vec![d_tg];
    let mut q_parts = Vec::new();
    let mut iotas = Vec::new();
    let mut lies = Vec::new();
    for (b, x) in premoment.iter().enumerate() {
        let iota = section_contraction(x, s)?;
        let lie = iota.bracket(&d_a)?;
        let iota_big = iota.embed(&table, &a_map)?;
        let lie_big = lie.embed(&table, &a_map)?;
        let th = Element::generator(&table, theta[b]);
        let thd = Element::generator(&table, theta_dot[b]);
        parts.push(lie_big.mul_left(&th)?);
        parts.push(iota_big.mul_left(&thd)?.scale(&q(-1)));
        q_parts.push(iota_big.mul_left(&th)?);
        iotas.push(iota);
        lies.push(lie);
    }
    let mut curvature = BTreeMap::new();
    for e in 0..r {
        let mut img = Element::zero(&table);
        for i in 0..r {
            for j in 0..r {
                let v = &c[i][j][e];
                if !v.is_zero() {
                    let tt = &Element::generator(&table, theta[i]) * &Element::generator(&table, theta[j]);
                    img = &img - &tt.scale(&(v * frac(1, 2)));
                }
            }
        }
        curvature.insert(theta_dot[e], img);
    }
    q_parts.push(Derivation::from_images(&table, 0, curvature)?);
    let q_field = sum(q_parts, &table, 0)?;
    let algebroid_part = sum(parts, &table, 1)?;
    let untwisted = d_a_big.checked_add(&d_k)?;
    let total = algebroid_part.checked_add(&untwisted)?;
    assert_homological("algebroid part", &algebroid_part)?;
    assert_homological("total Ginzburg differential", &total)?;

    let basic_table = GeneratorTable::new(
        a.generators()
            .iter()
            .chain(&tg.table().generators()[r..])
            .map(|x| (x.name.clone(), x.degree)),
    )?;
    let basic_theta_dot: Vec<usize> = (m..m + r).collect();
    let mut d_c = d_a.embed(&basic_table, &a_map)?;
    let mut invariance = Vec::with_capacity(r);
    for b in 0..r {
        let thd = Element::generator(&basic_table, basic_theta_dot[b]);
        d_c = d_c.checked_sub(&iotas[b].embed(&basic_table, &a_map)?.mul_left(&thd)?)?;
        invariance.push(
            coadjoint(&c, b, &basic_table, &basic_theta_dot)?
                .checked_add(&lies[b].embed(&basic_table, &a_map)?)?,
        );
    }
    let basic_embedding = a_map.iter().copied().chain(theta_dot.iter().copied()).collect();
    Ok(GinzburgModel {
        table,
        algebroid_part,
        total,
        untwisted,
        q: q_field,
        basic_table,
        d_c,
        invariance,
        basic_embedding,
        algebroid_len: m,
    })
}

/// `d_A + γ·Ξ` for a morphic homological field `Ξ`.
pub fn twisted(s: &StructureData, xi: &Derivation, gamma: &Rational) -> Result<Derivation> {
    let d_a = build_differential(s)?;
    if !crate::gca::same_table(xi.table(), s.algebra()) {
        return Err(Error::MismatchedAlgebra);
    }
    if !xi.is_zero() && xi.degree() != 1 {
        return Err(Error::DegreeMismatch(format!(
            "Ξ has degree {}, expected 1",
            xi.degree()
        )));
    }
    let comm = xi.bracket(&d_a)?;
    if let Some((g, img)) = comm.images().iter().enumerate().find(|(_, e)| !e.is_zero()) {
        return Err(Error::NotMorphic(format!(
            "[Ξ, d_A]({}) = {}",
            s.algebra().name(g),
            img
        )));
    }
    assert_homological("Ξ", xi)?;
    let out = d_a.checked_add(&xi.scale(gamma))?;
    assert_homological("twisted differential", &out)?;
    Ok(out)
}

/// The algebroid data of `[-1]T𝔤`, whose differential is `d_{[-1]T𝔤}` on the
/// Weil generators (frames `θ` with `p = 0`, `θ̇` with `p = −1`).
pub fn tangent_lie_structure(w: &WeilAlgebra) -> Result<StructureData> {
    crate::algebroids::extract_structure(&w.d_tg, 2 * w.rank(), 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotation() -> (Arc<GeneratorTable>, Vec<Derivation>) {
        let m = GeneratorTable::new([("x", 0), ("y", 0)]).unwrap();
        let x = Element::generator(&m, 0);
        let y = Element::generator(&m, 1);
        let rho = Derivation::from_images(&m, 0, BTreeMap::from([(0, -&y), (1, x)])).unwrap();
        (m, vec![rho])
    }

    fn circle() -> StructureData {
        StructureData::abelian(1)
    }

    #[test]
    fn weil_so3_images() {
        let w = weil(&StructureData::so3()).unwrap();
        let t = w.table();
        let e = |i| Element::generator(t, i);
        assert_eq!(*w.d_w.image(0), &e(3) - &(&e(1) * &e(2)));
        assert_eq!(*w.d_w.image(3), &(&e(2) * &e(4)) - &(&e(1) * &e(5)));
        let ab = weil(&StructureData::abelian(2)).unwrap();
        assert_eq!(ab.d_w, ab.d_k);
    }

    #[test]
    fn weil_tangent_part_is_lie_derivative_of_ce() {
        let g = StructureData::so3();
        let w = weil(&g).unwrap();
        let d_g = build_differential(&g).unwrap();
        assert_eq!(w.tangent.lie_derivative(&d_g).unwrap(), w.d_tg);
    }

    #[test]
    fn brst_rotation() {
        let (m, rho) = rotation();
        let b = brst(&circle(), &m, &rho).unwrap();
        let t = b.table();
        let e = |i| Element::generator(t, i);
        assert_eq!(
            *b.d_b.image(b.x(0)),
            &e(b.x_dot(0)) - &(&e(b.theta(0)) * &e(b.x(1)))
        );
    }

    #[test]
    fn brst_trivial_cases() {
        let point = GeneratorTable::new(std::iter::empty::<(String, i64)>()).unwrap();
        let g = StructureData::so3();
        let b = brst(&g, &point, &vec![Derivation::zero(&point, 0); 3]).unwrap();
        let w = weil(&g).unwrap();
        assert_eq!(b.d_b.images(), w.d_w.images());

        let line = GeneratorTable::new([("x", 0)]).unwrap();
        let b = brst(&circle(), &line, &[Derivation::zero(&line, 0)]).unwrap();
        let t = b.table();
        assert_eq!(*b.d_b.image(0), Element::generator(t, b.x_dot(0)));
        assert_eq!(*b.d_b.image(1), Element::generator(t, b.theta_dot(0)));
    }

    #[test]
    fn brst_rejects_non_action() {
        let (m, rho) = rotation();
        let x = Element::generator(&m, 0);
        let dil = Derivation::from_images(&m, 0, BTreeMap::from([(0, x)])).unwrap();
        let g = StructureData::abelian(2);
        assert_eq!(
            brst(&g, &m, &[rho[0].clone(), dil]).unwrap_err(),
            Error::NotAnAction { i: 0, j: 1 }
        );
    }

    #[test]
    fn mqk_reproduces_brst() {
        let (m, rho) = rotation();
        let b = brst(&circle(), &m, &rho).unwrap();
        let (lhs, rhs) = mqk(&b).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(rhs, b.d_b);
        let (lhs, rhs) = mqk_structure(&StructureData::abelian(1)).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn cartan_model_rotation() {
        let (m, rho) = rotation();
        let b = brst(&circle(), &m, &rho).unwrap();
        let cm = cartan_model(&b).unwrap();
        let t = &cm.table;
        let e = |i| Element::generator(t, i);
        assert_eq!(*cm.d_c.image(2), &e(4) * &e(1));
        assert_eq!(*cm.d_c.image(3), -(&e(4) * &e(0)));
    }

    #[test]
    fn bialgebra_examples() {
        let zero = vec![vec![vec![q(0); 2]; 2]; 2];
        let mut c = zero.clone();
        c[0][1][1] = q(1);
        c[1][0][1] = q(-1);
        let dbl = bialgebra_double(&c, &zero).unwrap();
        assert!(dbl.compatible && dbl.total_homological);
        assert!(bialgebra_double(&zero, &zero).unwrap().compatible);
        let mut gamma = zero.clone();
        gamma[0][1][0] = q(1);
        gamma[1][0][0] = q(-1);
        let dbl = bialgebra_double(&c, &gamma).unwrap();
        assert!(dbl.compatible && dbl.total_homological);
    }

    #[test]
    fn twisted_recovers_weil() {
        let w = weil(&StructureData::so3()).unwrap();
        let s = tangent_lie_structure(&w).unwrap();
        let xi = w.d_k.scale(&q(-1)).retable(s.algebra()).unwrap();
        let out = twisted(&s, &xi, &q(-1)).unwrap();
        assert_eq!(out.images(), w.d_w.images());
        assert_eq!(twisted(&s, &xi, &q(0)).unwrap().images(), w.d_tg.images());
    }

    fn plane_tangent() -> (StructureData, Vec<Section>) {
        let m = GeneratorTable::new([("x", 0), ("y", 0)]).unwrap();
        let x = Element::generator(&m, 0);
        let y = Element::generator(&m, 1);
        (
            StructureData::tangent(&m).unwrap(),
            vec![Section::new(vec![-y, x])],
        )
    }

    #[test]
    fn ginzburg_q_conjugates_untwisted_to_total() {
        let (s, pm) = plane_tangent();
        let gz = ginzburg(&s, &circle(), &pm).unwrap();
        assert_eq!(conjugate(&gz.untwisted, &gz.q, DEFAULT_CAP).unwrap(), gz.total);
        assert_eq!(
            conjugate(&gz.total, &gz.q.scale(&q(-1)), DEFAULT_CAP).unwrap(),
            gz.untwisted
        );
    }

    #[test]
    fn ginzburg_on_plane_matches_brst_and_cartan() {
        let (s, pm) = plane_tangent();
        let gz = ginzburg(&s, &circle(), &pm).unwrap();
        let (m, rho) = rotation();
        let b = brst(&circle(), &m, &rho).unwrap();
        // x, y, x', y', θ, θ̇ in BRST order x, y, θ, x', y', θ̇
        let to_brst = [b.x(0), b.x(1), b.x_dot(0), b.x_dot(1), b.theta(0), b.theta_dot(0)];
        assert_eq!(gz.total.embed(b.table(), &to_brst).unwrap(), b.d_b);
        let cm = cartan_model(&b).unwrap();
        assert_eq!(gz.d_c.retable(&cm.table).unwrap(), cm.d_c);
        for (a, b) in gz.invariance.iter().zip(&cm.invariance) {
            assert_eq!(&a.retable(&cm.table).unwrap(), b);
        }
    }

    #[test]
    fn ginzburg_degenerations() {
        let (s, _) = plane_tangent();
        let zero_g = StructureData::abelian(0);
        let gz = ginzburg(&s, &zero_g, &[]).unwrap();
        assert_eq!(
            gz.total.retable(s.algebra()).unwrap(),
            build_differential(&s).unwrap()
        );

        let a = StructureData::lie_algebra(&["a1"], &[]).unwrap();
        let g = StructureData::so3();
        let gz = ginzburg(&a, &g, &vec![Section::zero(&a); 3]).unwrap();
        let w = weil(&g).unwrap();
        let shift: Vec<usize> = (1..=w.table().len()).collect();
        assert_eq!(gz.total, w.d_w.embed(&gz.table, &shift).unwrap());
    }

    #[test]
    fn ginzburg_rejects_non_homomorphism() {
        let (s, pm) = plane_tangent();
        let g = StructureData::heisenberg();
        let bad = vec![pm[0].clone(), Section::zero(&s), pm[0].clone()];
        assert_eq!(
            ginzburg(&s, &g, &bad).unwrap_err(),
            Error::NotAnAction { i: 0, j: 1 }
        );
    }

    #[test]
    fn bialgebra_swap_symmetry_and_rejection() {
        use rand::SeedableRng;
        let zero = vec![vec![vec![q(0); 2]; 2]; 2];
        let mut c = zero.clone();
        c[0][1][1] = q(1);
        c[1][0][1] = q(-1);
        for (x, y) in [(&c, &zero), (&zero, &c), (&c, &c)] {
            assert_eq!(
                bialgebra_double(x, y).unwrap().compatible,
                bialgebra_double(y, x).unwrap().compatible
            );
        }
        let so3 = structure_constants(&StructureData::so3()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let gamma = random_abelian_extension_cobracket(&mut rng);
        let dbl = bialgebra_double(&so3, &gamma).unwrap();
        assert!(!dbl.compatible);
        assert!(dbl.witness.unwrap().starts_with("[d,Ξ]("));
    }

    /// Cobracket on a 3-dim space with only `γ^{12}_3` nonzero: Jacobi holds
    /// for any value, and no nonzero value is a cocycle for so(3).
    fn random_abelian_extension_cobracket<R: rand::Rng>(rng: &mut R) -> Vec<Vec<Vec<Rational>>> {
        let mut g = vec![vec![vec![q(0); 3]; 3]; 3];
        let v = q(rng.gen_range(1..=5));
        g[0][1][2] = v.clone();
        g[1][0][2] = -v;
        g
    }
}
