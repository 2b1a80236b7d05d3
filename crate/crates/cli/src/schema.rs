//! Job files: JSON payloads and their conversion to engine data.

use std::collections::BTreeMap;
use std::collections::HashMap;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::Zero;
use qforms_core::algebroids::{jacobi_witness, Section, StructureData};
use qforms_core::gca::{Element, GeneratorTable, Monomial, Rational};
use qforms_core::simplicial::{Arrow, FiniteGroupoid, PolyActionGroupoid};
use qforms_core::Derivation;
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Check,
    Betti,
    Basic,
    Mqk,
    Double,
    Ginzburg,
    Vanest,
    CartanSuite,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Check => "check",
            Kind::Betti => "betti",
            Kind::Basic => "basic",
            Kind::Mqk => "mqk",
            Kind::Double => "double",
            Kind::Ginzburg => "ginzburg",
            Kind::Vanest => "vanest",
            Kind::CartanSuite => "cartan-suite",
        }
    }

    pub fn needs_window(self) -> bool {
        matches!(self, Kind::Betti | Kind::Basic | Kind::Ginzburg)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Table,
}

/// A rational given as an integer or a string such as `"-3/2"`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum RationalSpec {
    Int(i64),
    Text(String),
}

impl RationalSpec {
    pub fn value(&self) -> CliResult<Rational> {
        match self {
            RationalSpec::Int(n) => Ok(Rational::from_integer((*n).into())),
            RationalSpec::Text(s) => Rational::from_str(s.trim())
                .map_err(|_| CliError::parse(format!("`{s}` is not a rational number"))),
        }
    }
}

/// A polynomial as a map from comma-separated exponent vectors to
/// coefficients, or a bare constant.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum PolySpec {
    Constant(RationalSpec),
    Terms(BTreeMap<String, RationalSpec>),
}

impl PolySpec {
    pub fn element(&self, table: &Arc<GeneratorTable>) -> CliResult<Element> {
        match self {
            PolySpec::Constant(c) => Ok(Element::scalar(table, c.value()?)),
            PolySpec::Terms(map) => {
                let mut terms = Vec::new();
                for (key, c) in map {
                    let exps = parse_exponents(key, table.len())?;
                    let m = Monomial::from_exponents(table, &exps).ok_or_else(|| {
                        CliError::parse(format!("exponent vector `{key}` repeats an odd generator"))
                    })?;
                    terms.push((m, c.value()?));
                }
                Ok(Element::from_terms(table, terms))
            }
        }
    }
}

fn parse_exponents(key: &str, len: usize) -> CliResult<Vec<u32>> {
    let body = key.trim().trim_start_matches('[').trim_end_matches(']');
    let exps: Vec<u32> = if body.trim().is_empty() {
        Vec::new()
    } else {
        body.split(',')
            .map(|p| {
                p.trim()
                    .parse::<u32>()
                    .map_err(|_| CliError::parse(format!("bad exponent vector `{key}`")))
            })
            .collect::<CliResult<_>>()?
    };
    if exps.len() != len {
        return Err(CliError::parse(format!(
            "exponent vector `{key}` has {} entries, expected {len}",
            exps.len()
        )));
    }
    Ok(exps)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenSpec {
    pub name: String,
    #[serde(default)]
    pub degree: i64,
}

/// A generator given by name or by 1-based position.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum IndexSpec {
    Pos(usize),
    Name(String),
}

fn resolve(names: &[String], key: &IndexSpec, what: &str) -> CliResult<usize> {
    match key {
        IndexSpec::Pos(p) if (1..=names.len()).contains(p) => Ok(p - 1),
        IndexSpec::Pos(p) => Err(CliError::parse(format!("{what} index {p} out of range"))),
        IndexSpec::Name(n) => resolve_name(names, n, what),
    }
}

fn resolve_name(names: &[String], key: &str, what: &str) -> CliResult<usize> {
    if let Some(i) = names.iter().position(|n| n == key) {
        return Ok(i);
    }
    match key.parse::<usize>() {
        Ok(p) if (1..=names.len()).contains(&p) => Ok(p - 1),
        _ => Err(CliError::parse(format!("unknown {what} `{key}`"))),
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketSpec {
    pub i: IndexSpec,
    pub j: IndexSpec,
    pub coeffs: BTreeMap<String, RationalSpec>,
}

/// `{basis: [{name, degree}], brackets: [{i, j, coeffs: {k: q}}]}`; the
/// degree of a basis element is its frame degree `p`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LieAlgebraSpec {
    pub basis: Vec<GenSpec>,
    #[serde(default)]
    pub brackets: Vec<BracketSpec>,
}

pub type Constants = Vec<Vec<Vec<Rational>>>;

fn koszul(odd: bool) -> Rational {
    Rational::from_integer(if odd { (-1).into() } else { 1.into() })
}

impl LieAlgebraSpec {
    fn names(&self) -> Vec<String> {
        self.basis.iter().map(|g| g.name.clone()).collect()
    }

    /// Dense constants, completing `[e_j, e_i]` by graded antisymmetry when
    /// only `[e_i, e_j]` is given.
    pub fn constants(&self) -> CliResult<Constants> {
        let names = self.names();
        let n = names.len();
        let p: Vec<i64> = self.basis.iter().map(|g| g.degree).collect();
        let mut c = vec![vec![vec![Rational::zero(); n]; n]; n];
        let mut given = vec![vec![false; n]; n];
        for b in &self.brackets {
            let i = resolve(&names, &b.i, "basis element")?;
            let j = resolve(&names, &b.j, "basis element")?;
            if given[i][j] {
                return Err(CliError::parse(format!(
                    "bracket [{}, {}] given twice",
                    names[i], names[j]
                )));
            }
            given[i][j] = true;
            for (k, v) in &b.coeffs {
                let k = resolve_name(&names, k, "basis element")?;
                c[i][j][k] = v.value()?;
            }
        }
        for i in 0..n {
            for j in 0..n {
                if given[i][j] && !given[j][i] {
                    let s = -koszul(p[i] * p[j] % 2 != 0);
                    for k in 0..n {
                        c[j][i][k] = &c[i][j][k] * &s;
                    }
                }
            }
        }
        Ok(c)
    }

    pub fn structure(&self) -> CliResult<StructureData> {
        let c = self.constants()?;
        let ungraded = self.basis.iter().all(|g| g.degree % 2 == 0);
        if ungraded {
            if let Some(w) = jacobi_triple(&c, &self.names()) {
                return Err(CliError::validation("Jacobi identity", w));
            }
        }
        let base = GeneratorTable::new(std::iter::empty::<(String, i64)>())?;
        let frames: Vec<(String, i64)> = self.basis.iter().map(|g| (g.name.clone(), g.degree)).collect();
        let brackets = c
            .iter()
            .map(|ci| {
                ci.iter()
                    .map(|cij| cij.iter().map(|v| Element::scalar(&base, v.clone())).collect())
                    .collect()
            })
            .collect();
        let s = StructureData::new(&base, &frames, vec![vec![]; frames.len()], brackets)?;
        if !ungraded {
            jacobi_witness(&s)?;
        }
        Ok(s)
    }
}

/// First triple `(i, j, k)` whose Jacobiator `Σ_cyc [[e_i, e_j], e_k]` does
/// not vanish, for ungraded constants.
pub fn jacobi_triple(c: &Constants, names: &[String]) -> Option<String> {
    let n = c.len();
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                let mut out = vec![Rational::zero(); n];
                for m in 0..n {
                    for l in 0..n {
                        out[l] += &c[i][j][m] * &c[m][k][l];
                        out[l] += &c[j][k][m] * &c[m][i][l];
                        out[l] += &c[k][i][m] * &c[m][j][l];
                    }
                }
                if let Some(l) = out.iter().position(|v| !v.is_zero()) {
                    return Some(format!(
                        "triple ({}, {}, {}): Jacobiator has {} component {}",
                        names[i], names[j], names[k], names[l], out[l]
                    ));
                }
            }
        }
    }
    None
}

/// Base coordinates given as names (degree 0) or `{name, degree}`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum CoordSpec {
    Name(String),
    Gen(GenSpec),
}

fn coord_table(coords: &[CoordSpec]) -> CliResult<Arc<GeneratorTable>> {
    Ok(GeneratorTable::new(coords.iter().map(|c| match c {
        CoordSpec::Name(n) => (n.clone(), 0),
        CoordSpec::Gen(g) => (g.name.clone(), g.degree),
    }))?)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebroidSpec {
    pub base: Vec<CoordSpec>,
    pub basis: Vec<GenSpec>,
    #[serde(default)]
    pub anchor: BTreeMap<String, BTreeMap<String, PolySpec>>,
    /// Keys `"α,β"`.
    #[serde(default)]
    pub structure: BTreeMap<String, BTreeMap<String, PolySpec>>,
}

impl AlgebroidSpec {
    pub fn structure(&self) -> CliResult<StructureData> {
        let base = coord_table(&self.base)?;
        let base_names: Vec<String> = base.generators().iter().map(|g| g.name.clone()).collect();
        let names: Vec<String> = self.basis.iter().map(|g| g.name.clone()).collect();
        let (n, r) = (base.len(), names.len());
        let mut anchor = vec![vec![Element::zero(&base); n]; r];
        for (a, comps) in &self.anchor {
            let a = resolve_name(&names, a, "basis element")?;
            for (i, poly) in comps {
                let i = resolve_name(&base_names, i, "base coordinate")?;
                anchor[a][i] = poly.element(&base)?;
            }
        }
        let p: Vec<i64> = self.basis.iter().map(|g| g.degree).collect();
        let mut brackets = vec![vec![vec![Element::zero(&base); r]; r]; r];
        let mut given = vec![vec![false; r]; r];
        for (key, comps) in &self.structure {
            let (a, b) = key
                .split_once(',')
                .ok_or_else(|| CliError::parse(format!("structure key `{key}` is not `α,β`")))?;
            let a = resolve_name(&names, a.trim(), "basis element")?;
            let b = resolve_name(&names, b.trim(), "basis element")?;
            given[a][b] = true;
            for (g, poly) in comps {
                let g = resolve_name(&names, g, "basis element")?;
                brackets[a][b][g] = poly.element(&base)?;
            }
        }
        for a in 0..r {
            for b in 0..r {
                if given[a][b] && !given[b][a] {
                    let s = -koszul(p[a] * p[b] % 2 != 0);
                    for g in 0..r {
                        brackets[b][a][g] = brackets[a][b][g].scale(&s);
                    }
                }
            }
        }
        let frames: Vec<(String, i64)> = self.basis.iter().map(|g| (g.name.clone(), g.degree)).collect();
        Ok(StructureData::new(&base, &frames, anchor, brackets)?)
    }
}

/// `{manifold: [names], vector_fields: {b: {i: poly}}}` for a Lie algebra
/// acting on a coordinate space.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionSpec {
    pub manifold: Vec<CoordSpec>,
    pub vector_fields: BTreeMap<String, BTreeMap<String, PolySpec>>,
}

impl ActionSpec {
    pub fn fields(&self, g: &LieAlgebraSpec) -> CliResult<(Arc<GeneratorTable>, Vec<Derivation>)> {
        let m = coord_table(&self.manifold)?;
        let names = g.names();
        let coords: Vec<String> = m.generators().iter().map(|g| g.name.clone()).collect();
        let mut images = vec![BTreeMap::new(); names.len()];
        for (b, comps) in &self.vector_fields {
            let b = resolve_name(&names, b, "basis element")?;
            for (i, poly) in comps {
                let i = resolve_name(&coords, i, "manifold coordinate")?;
                images[b].insert(i, poly.element(&m)?);
            }
        }
        let fields = images
            .into_iter()
            .map(|im| Derivation::from_images(&m, 0, im))
            .collect::<Result<Vec<_>, _>>()?;
        Ok((m, fields))
    }
}

/// `{dimension, c: [...], gamma: [...]}` with brackets as in a Lie algebra.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BialgebraSpec {
    pub dimension: usize,
    #[serde(default)]
    pub c: Vec<BracketSpec>,
    #[serde(default)]
    pub gamma: Vec<BracketSpec>,
}

impl BialgebraSpec {
    fn half(&self, brackets: &[BracketSpec]) -> CliResult<Constants> {
        LieAlgebraSpec {
            basis: (1..=self.dimension)
                .map(|i| GenSpec {
                    name: format!("e{i}"),
                    degree: 0,
                })
                .collect(),
            brackets: brackets.to_vec(),
        }
        .constants()
    }

    pub fn constants(&self) -> CliResult<(Constants, Constants)> {
        Ok((self.half(&self.c)?, self.half(&self.gamma)?))
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowSpec {
    pub name: String,
    pub source: String,
    pub target: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupTableSpec {
    pub elements: Vec<String>,
    pub table: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupoidSpec {
    /// Either `group` or `objects` + `arrows` + `compose` (`[a, b, ab]`).
    Finite {
        #[serde(default)]
        group: Option<GroupTableSpec>,
        #[serde(default)]
        objects: Vec<String>,
        #[serde(default)]
        arrows: Vec<ArrowSpec>,
        #[serde(default)]
        compose: Vec<[String; 3]>,
    },
    /// `mu` over `g1..gn, h1..hn`; `action` over `x1..xm, g1..gn`.
    PolyAction {
        base_dim: usize,
        group_dim: usize,
        mu: Vec<PolySpec>,
        #[serde(default)]
        action: Vec<PolySpec>,
    },
}

pub enum Groupoid {
    Finite(FiniteGroupoid),
    Poly(PolyActionGroupoid),
}

impl GroupoidSpec {
    pub fn build(&self) -> CliResult<Groupoid> {
        match self {
            GroupoidSpec::Finite {
                group: Some(g),
                objects,
                arrows,
                compose,
            } => {
                if !objects.is_empty() || !arrows.is_empty() || !compose.is_empty() {
                    return Err(CliError::parse(
                        "give either `group` or `objects`/`arrows`/`compose`",
                    ));
                }
                let table = g
                    .table
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|x| resolve_name(&g.elements, x, "group element"))
                            .collect::<CliResult<Vec<_>>>()
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                if table.len() != g.elements.len() || table.iter().any(|r| r.len() != g.elements.len()) {
                    return Err(CliError::parse("group table must be square over `elements`"));
                }
                let refs: Vec<&str> = g.elements.iter().map(String::as_str).collect();
                Ok(Groupoid::Finite(FiniteGroupoid::from_group(&refs, &table)?))
            }
            GroupoidSpec::Finite {
                group: None,
                objects,
                arrows,
                compose,
            } => {
                let names: Vec<String> = arrows.iter().map(|a| a.name.clone()).collect();
                let arrows = arrows
                    .iter()
                    .map(|a| {
                        Ok(Arrow {
                            name: a.name.clone(),
                            source: resolve_name(objects, &a.source, "object")?,
                            target: resolve_name(objects, &a.target, "object")?,
                        })
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                let mut table = HashMap::new();
                for [a, b, c] in compose {
                    table.insert(
                        (
                            resolve_name(&names, a, "arrow")?,
                            resolve_name(&names, b, "arrow")?,
                        ),
                        resolve_name(&names, c, "arrow")?,
                    );
                }
                Ok(Groupoid::Finite(FiniteGroupoid::new(
                    objects.clone(),
                    arrows,
                    table,
                )?))
            }
            GroupoidSpec::PolyAction {
                base_dim,
                group_dim,
                mu,
                action,
            } => {
                let lt = PolyActionGroupoid::law_table(*group_dim);
                let at = PolyActionGroupoid::action_table(*base_dim, *group_dim);
                let mu = mu.iter().map(|p| p.element(&lt)).collect::<CliResult<Vec<_>>>()?;
                let action = action
                    .iter()
                    .map(|p| p.element(&at))
                    .collect::<CliResult<Vec<_>>>()?;
                Ok(Groupoid::Poly(PolyActionGroupoid::new(
                    *base_dim, *group_dim, mu, action,
                )?))
            }
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSpec {
    #[serde(default)]
    pub assignment: Option<Vec<i64>>,
    pub value: i64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobFile {
    #[serde(default)]
    pub kind: Option<Kind>,
    #[serde(default)]
    pub window: Option<[i64; 2]>,
    #[serde(default)]
    pub weight: Option<WeightSpec>,
    #[serde(default)]
    pub format: Option<Format>,
    /// `ce`, `weil`, `brst` or `cartan`, where the payload admits several.
    #[serde(default)]
    pub model: Option<String>,
    #[serde(default)]
    pub lie_algebra: Option<LieAlgebraSpec>,
    #[serde(default)]
    pub algebroid: Option<AlgebroidSpec>,
    #[serde(default)]
    pub action: Option<ActionSpec>,
    #[serde(default)]
    pub bialgebra: Option<BialgebraSpec>,
    #[serde(default)]
    pub groupoid: Option<GroupoidSpec>,
    /// `{b: {α: poly}}`: the section `ã(v_b)` of the algebroid.
    #[serde(default)]
    pub premoment: Option<BTreeMap<String, BTreeMap<String, PolySpec>>>,
    /// Generators of a free graded algebra, for the Cartan relations suite.
    #[serde(default)]
    pub algebra: Option<Vec<GenSpec>>,
}

/// The one payload a job file carries.
pub enum Payload {
    LieAlgebra(LieAlgebraSpec),
    Algebroid(AlgebroidSpec),
    Action(LieAlgebraSpec, ActionSpec),
    Ginzburg(
        AlgebroidSpec,
        LieAlgebraSpec,
        BTreeMap<String, BTreeMap<String, PolySpec>>,
    ),
    Bialgebra(BialgebraSpec),
    Groupoid(GroupoidSpec),
    Algebra(Vec<GenSpec>),
}

impl Payload {
    pub fn name(&self) -> &'static str {
        match self {
            Payload::LieAlgebra(_) => "lie_algebra",
            Payload::Algebroid(_) => "algebroid",
            Payload::Action(..) => "action",
            Payload::Ginzburg(..) => "ginzburg",
            Payload::Bialgebra(_) => "bialgebra",
            Payload::Groupoid(_) => "groupoid",
            Payload::Algebra(_) => "algebra",
        }
    }
}

pub struct JobSpec {
    pub kind: Kind,
    pub payload: Payload,
    pub window: Option<(i64, i64)>,
    pub weight: Option<WeightSpec>,
    pub format: Format,
    pub model: Option<String>,
}

/// Reads the file, applies command-line overrides and checks the payload shape.
pub fn parse(text: &str, kind: Kind, overrides: &Overrides) -> CliResult<JobSpec> {
    let file: JobFile = serde_json::from_str(text)
        .map_err(|e| CliError::parse(format!("line {}, column {}: {}", e.line(), e.column(), e)))?;
    if let Some(k) = file.kind {
        if k != kind {
            return Err(CliError::parse(format!(
                "file declares kind `{}` but `{}` was requested",
                k.name(),
                kind.name()
            )));
        }
    }
    let payload = match (
        file.lie_algebra,
        file.algebroid,
        file.action,
        file.premoment,
        file.bialgebra,
        file.groupoid,
        file.algebra,
    ) {
        (Some(g), None, None, None, None, None, None) => Payload::LieAlgebra(g),
        (None, Some(a), None, None, None, None, None) => Payload::Algebroid(a),
        (Some(g), None, Some(act), None, None, None, None) => Payload::Action(g, act),
        (Some(g), Some(a), None, Some(pm), None, None, None) => Payload::Ginzburg(a, g, pm),
        (None, None, None, None, Some(b), None, None) => Payload::Bialgebra(b),
        (None, None, None, None, None, Some(g), None) => Payload::Groupoid(g),
        (None, None, None, None, None, None, Some(a)) => Payload::Algebra(a),
        _ => {
            return Err(CliError::parse(
                "expected exactly one payload: lie_algebra, algebroid, lie_algebra + action, \
                 algebroid + lie_algebra + premoment, bialgebra, groupoid or algebra",
            ))
        }
    };
    let window = match overrides.window.or(file.window.map(|[a, b]| (a, b))) {
        Some((a, b)) if a > b => return Err(CliError::parse(format!("window {a}..{b} is empty"))),
        w => w,
    };
    if kind.needs_window() && window.is_none() {
        return Err(CliError::parse(format!(
            "`{}` needs a degree window",
            kind.name()
        )));
    }
    let weight = match (overrides.weight, file.weight) {
        (Some(v), Some(w)) => Some(WeightSpec { value: v, ..w }),
        (Some(v), None) => Some(WeightSpec {
            assignment: None,
            value: v,
        }),
        (None, w) => w,
    };
    let format = if overrides.json {
        Format::Json
    } else {
        file.format.unwrap_or(Format::Table)
    };
    Ok(JobSpec {
        kind,
        payload,
        window,
        weight,
        format,
        model: file.model,
    })
}

#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub window: Option<(i64, i64)>,
    pub weight: Option<i64>,
    pub json: bool,
}

/// Parses `a..b` (inclusive).
pub fn parse_window(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("`{s}` is not of the form a..b"))?;
    let a = a.trim().parse::<i64>().map_err(|e| e.to_string())?;
    let b = b.trim().parse::<i64>().map_err(|e| e.to_string())?;
    Ok((a, b))
}

/// The section map `b ↦ ã(v_b)` over the algebroid's base.
pub fn premoment_sections(
    s: &StructureData,
    g: &LieAlgebraSpec,
    pm: &BTreeMap<String, BTreeMap<String, PolySpec>>,
    frame_names: &[String],
) -> CliResult<Vec<Section>> {
    let names = g.names();
    let mut out = vec![Section::zero(s); names.len()];
    for (b, comps) in pm {
        let b = resolve_name(&names, b, "Lie algebra element")?;
        for (a, poly) in comps {
            let a = resolve_name(frame_names, a, "algebroid frame")?;
            out[b].coefficients[a] = poly.element(s.base())?;
        }
    }
    Ok(out)
}
