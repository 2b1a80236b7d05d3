//! The odd tangent construction and Cartan calculus.
//!
//! For a table with generators `x^i` the odd tangent table appends dotted
//! generators `ẋ^i` (written `x'`) of degree `|x^i| + 1`. The de Rham
//! differential sends `x ↦ ẋ`, contractions `ι_X` send `ẋ ↦ X(x)` and Lie
//! derivatives are `𝓛_X = [ι_X, d]`.

use std::collections::HashSet;
use std::sync::Arc;

use crate::derivations::Derivation;
use crate::error::{Error, Result};
use crate::gca::{same_table, Element, GeneratorTable};

#[derive(Clone, Debug)]
pub struct OddTangent {
    base: Arc<GeneratorTable>,
    table: Arc<GeneratorTable>,
    d: Derivation,
}

/// Name of the dotted copy of `name`: a trailing prime, with a `#k` suffix
/// when the primed name is already taken (iterated tangents).
fn dotted_name(name: &str, taken: &HashSet<String>) -> String {
    let primed = format!("{name}'");
    if !taken.contains(&primed) {
        return primed;
    }
    (2..)
        .map(|k| format!("{primed}#{k}"))
        .find(|c| !taken.contains(c))
        .expect("unbounded search")
}

/// Builds the odd tangent algebra of `base`.
pub fn odd_tangent(base: &Arc<GeneratorTable>) -> Result<OddTangent> {
    let mut taken: HashSet<String> = base.generators().iter().map(|g| g.name.clone()).collect();
    let mut gens: Vec<(String, i64)> = base
        .generators()
        .iter()
        .map(|g| (g.name.clone(), g.degree))
        .collect();
    for g in base.generators() {
        let name = dotted_name(&g.name, &taken);
        taken.insert(name.clone());
        gens.push((name, g.degree + 1));
    }
    let table = GeneratorTable::new(gens)?;
    let n = base.len();
    let mut images: Vec<Element> = (0..n).map(|i| Element::generator(&table, n + i)).collect();
    images.extend((0..n).map(|_| Element::zero(&table)));
    let d = Derivation::new(&table, 1, images)?;
    Ok(OddTangent {
        base: base.clone(),
        table,
        d,
    })
}

impl OddTangent {
    pub fn base(&self) -> &Arc<GeneratorTable> {
        &self.base
    }

    pub fn table(&self) -> &Arc<GeneratorTable> {
        &self.table
    }

    /// The de Rham differential.
    pub fn d(&self) -> &Derivation {
        &self.d
    }

    pub fn base_len(&self) -> usize {
        self.base.len()
    }

    /// Index of `ẋ^i`.
    pub fn dot(&self, i: usize) -> usize {
        self.base.len() + i
    }

    /// Includes a base element into the odd tangent algebra.
    pub fn include(&self, a: &Element) -> Result<Element> {
        if !same_table(a.table(), &self.base) {
            return Err(Error::MismatchedAlgebra);
        }
        if a.is_zero() {
            return Ok(Element::zero(&self.table));
        }
        a.reinterpret(&self.table)
    }

    fn check_field(&self, x: &Derivation) -> Result<()> {
        if same_table(x.table(), &self.base) {
            Ok(())
        } else {
            Err(Error::MismatchedAlgebra)
        }
    }

    /// `ι_X`: `x ↦ 0`, `ẋ ↦ X(x)`, of degree `|X| − 1`.
    pub fn contraction(&self, x: &Derivation) -> Result<Derivation> {
        self.check_field(x)?;
        let n = self.base.len();
        let mut images: Vec<Element> = (0..n).map(|_| Element::zero(&self.table)).collect();
        for i in 0..n {
            images.push(self.include(x.image(i))?);
        }
        Derivation::new(&self.table, x.degree() - 1, images)
    }

    /// `𝓛_X = [ι_X, d]`, of degree `|X|`.
    pub fn lie_derivative(&self, x: &Derivation) -> Result<Derivation> {
        self.contraction(x)?.bracket(&self.d)
    }

    /// `[-1]Tμ*` for an algebra morphism `μ*: self.base → target.base` given
    /// by generator images: `x ↦ μ*(x)`, `ẋ ↦ d(μ*(x))`.
    pub fn tangent_map(&self, target: &OddTangent, images: &[Element]) -> Result<Vec<Element>> {
        if images.len() != self.base.len() {
            return Err(Error::Shape(format!(
                "morphism needs {} images, got {}",
                self.base.len(),
                images.len()
            )));
        }
        let lifted: Vec<Element> = images.iter().map(|e| target.include(e)).collect::<Result<_>>()?;
        let dotted: Vec<Element> = lifted.iter().map(|e| target.d.on(e)).collect();
        Ok(lifted.into_iter().chain(dotted).collect())
    }
}

/// Outcome of one Cartan relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationResult {
    pub name: &'static str,
    pub passed: bool,
    /// First generator where the two sides differ, with the difference.
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartanReport {
    pub relations: Vec<RelationResult>,
}

impl CartanReport {
    pub fn all_passed(&self) -> bool {
        self.relations.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &RelationResult> {
        self.relations.iter().filter(|r| !r.passed)
    }
}

fn compare(name: &'static str, lhs: &Derivation, rhs: &Derivation) -> RelationResult {
    let t = lhs.table();
    let witness = lhs
        .images()
        .iter()
        .zip(rhs.images())
        .enumerate()
        .find(|(_, (a, b))| a != b)
        .map(|(i, (a, b))| format!("on {}: {}", t.name(i), a - b));
    RelationResult {
        name,
        passed: witness.is_none() && (lhs.degree() == rhs.degree() || lhs.is_zero()),
        witness,
    }
}

/// Checks the five Cartan relations for base fields `X`, `Y`.
pub fn cartan_suite(t: &OddTangent, x: &Derivation, y: &Derivation) -> Result<CartanReport> {
    cartan_suite_with(t, x, y, |f| t.contraction(f))
}

/// [`cartan_suite`] with a caller-supplied contraction operator, so that
/// defective contractions can be tested against the relations.
pub fn cartan_suite_with<F>(
    t: &OddTangent,
    x: &Derivation,
    y: &Derivation,
    contraction: F,
) -> Result<CartanReport>
where
    F: Fn(&Derivation) -> Result<Derivation>,
{
    let d = t.d();
    let ix = contraction(x)?;
    let iy = contraction(y)?;
    let xy = x.bracket(y)?;
    let ixy = contraction(&xy)?;
    let lx = ix.bracket(d)?;
    let ly = iy.bracket(d)?;
    let lxy = ixy.bracket(d)?;
    let zero = |deg| Derivation::zero(t.table(), deg);

    let dd = d.bracket(d)?;
    let ii = ix.bracket(&iy)?;
    let li = lx.bracket(&iy)?;
    let ll = lx.bracket(&ly)?;
    let dl = d.bracket(&lx)?;
    Ok(CartanReport {
        relations: vec![
            compare("[d,d] = 0", &dd, &zero(dd.degree())),
            compare("[i_X,i_Y] = 0", &ii, &zero(ii.degree())),
            compare("[L_X,i_Y] = i_[X,Y]", &li, &ixy),
            compare("[L_X,L_Y] = L_[X,Y]", &ll, &lxy),
            compare("[d,L_X] = 0", &dl, &zero(dl.degree())),
        ],
    })
}
