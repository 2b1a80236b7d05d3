//! Dispatch of job kinds over payloads.

use std::sync::Arc;

use qforms_core::algebroids::{build_differential, jacobi_witness};
use qforms_core::cartan::{cartan_suite, odd_tangent};
use qforms_core::cohomology::{basic_betti, betti, representatives, ComplexSpec};
use qforms_core::derivations::conjugate;
use qforms_core::gca::GeneratorTable;
use qforms_core::models::{
    bialgebra_double, brst, cartan_model, ginzburg, mqk, mqk_structure, weil, BrstComplex, GinzburgModel,
};
use qforms_core::random;
use qforms_core::simplicial::{Nerve, PolyActionGroupoid};
use qforms_core::WeightAssignment;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::report::Report;
use crate::schema::{premoment_sections, Groupoid, JobSpec, Kind, Payload};

const CONJUGATION_CAP: usize = 64;

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub reps: bool,
    pub seed: u64,
    pub samples: usize,
}

pub fn run(job: &JobSpec, opts: &RunOptions) -> CliResult<Report> {
    let mut r = Report::new(job.kind.name());
    r.field("payload", json!(job.payload.name()));
    match job.kind {
        Kind::Check => check(job, &mut r)?,
        Kind::Betti => run_betti(job, opts, &mut r)?,
        Kind::Basic => run_basic(job, &mut r)?,
        Kind::Mqk => run_mqk(job, &mut r)?,
        Kind::Double => run_double(job, &mut r)?,
        Kind::Ginzburg => run_ginzburg(job, &mut r)?,
        Kind::Vanest => run_vanest(job, opts, &mut r)?,
        Kind::CartanSuite => run_cartan_suite(job, opts, &mut r)?,
    }
    Ok(r)
}

fn unsupported(job: &JobSpec) -> CliError {
    CliError::parse(format!(
        "`{}` does not accept the {} payload",
        job.kind.name(),
        job.payload.name()
    ))
}

fn window(job: &JobSpec) -> (i64, i64) {
    job.window.expect("window is checked while parsing")
}

fn action_model(
    g: &crate::schema::LieAlgebraSpec,
    act: &crate::schema::ActionSpec,
) -> CliResult<BrstComplex> {
    let s = g.structure()?;
    let (m, fields) = act.fields(g)?;
    brst(&s, &m, &fields).map_err(|e| named_action_error(e, g))
}

fn named_action_error(e: qforms_core::Error, g: &crate::schema::LieAlgebraSpec) -> CliError {
    match e {
        qforms_core::Error::NotAnAction { i, j } => CliError::validation(
            "action",
            format!(
                "bracket [{}, {}] is not reproduced by the action",
                g.basis[i].name, g.basis[j].name
            ),
        ),
        e => e.into(),
    }
}

/// Weight 1 on the algebroid generators and 0 on `θ`, `θ̇`.
fn ginzburg_weights(m: &GinzburgModel) -> WeightAssignment {
    let r = m.table.len() - m.basic_table.len();
    let a = m.basic_table.len() - r;
    WeightAssignment::new(
        std::iter::repeat_n(1, a)
            .chain(std::iter::repeat_n(0, 2 * r))
            .collect(),
    )
}

fn ginzburg_model(job: &JobSpec) -> CliResult<Option<GinzburgModel>> {
    let Payload::Ginzburg(a, g, pm) = &job.payload else {
        return Ok(None);
    };
    let s = a.structure()?;
    jacobi_witness(&s)?;
    let gs = g.structure()?;
    let frames: Vec<String> = a.basis.iter().map(|b| b.name.clone()).collect();
    let sections = premoment_sections(&s, g, pm, &frames)?;
    ginzburg(&s, &gs, &sections)
        .map(Some)
        .map_err(|e| named_action_error(e, g))
}

/// Applies the job's weight, taking the assignment from the file when given
/// and from the model otherwise.
fn weighted(job: &JobSpec, spec: ComplexSpec, default: Option<WeightAssignment>) -> CliResult<ComplexSpec> {
    let Some(w) = &job.weight else {
        return Ok(spec);
    };
    let assignment = match (&w.assignment, default) {
        (Some(a), _) => WeightAssignment::new(a.clone()),
        (None, Some(d)) => d,
        (None, None) => {
            return Err(CliError::parse(format!(
                "a weight on the {} payload needs an explicit assignment",
                job.payload.name()
            )))
        }
    };
    if assignment.0.len() != spec.table().len() {
        return Err(CliError::parse(format!(
            "weight assignment has {} entries, the complex has {} generators",
            assignment.0.len(),
            spec.table().len()
        )));
    }
    Ok(spec.with_weight(assignment, w.value))
}

fn model_name<'a>(job: &'a JobSpec, default: &'a str, allowed: &[&str]) -> CliResult<&'a str> {
    let m = job.model.as_deref().unwrap_or(default);
    if allowed.contains(&m) {
        Ok(m)
    } else {
        Err(CliError::parse(format!(
            "model `{m}` is not available for the {} payload (expected one of {})",
            job.payload.name(),
            allowed.join(", ")
        )))
    }
}

fn check(job: &JobSpec, r: &mut Report) -> CliResult<()> {
    match &job.payload {
        Payload::LieAlgebra(g) => {
            let s = g.structure()?;
            r.field("dimension", json!(s.rank()));
            r.check("jacobi", "Jacobi identity", true, None);
            let d = build_differential(&s)?;
            r.check("homological", "d² = 0", d.is_homological(), None);
        }
        Payload::Algebroid(a) => {
            let s = a.structure()?;
            r.field("rank", json!(s.rank()));
            r.field("base_dimension", json!(s.base_len()));
            jacobi_witness(&s)?;
            r.check("jacobi", "Jacobi identity", true, None);
            let d = build_differential(&s)?;
            r.check("homological", "d² = 0", d.is_homological(), None);
        }
        Payload::Action(g, act) => {
            let b = action_model(g, act)?;
            r.check("action", "action homomorphism", true, None);
            r.check("homological", "D_B² = 0", b.d_b.is_homological(), None);
        }
        Payload::Ginzburg(..) => {
            let m = ginzburg_model(job)?.expect("ginzburg payload");
            r.check("premoment", "pre-moment homomorphism", true, None);
            r.check(
                "homological",
                "total differential squares to zero",
                m.total.is_homological(),
                None,
            );
        }
        Payload::Bialgebra(b) => {
            let (c, gamma) = b.constants()?;
            let d = bialgebra_double(&c, &gamma)?;
            r.check("compatible", "[d, Ξ] = 0", d.compatible, d.witness.clone());
        }
        Payload::Groupoid(g) => {
            let (failures, qmax) = match g.build()? {
                Groupoid::Finite(f) => (f.simplicial_failures(3)?, 3),
                Groupoid::Poly(p) => (p.simplicial_failures(2)?, 2),
            };
            r.field("levels_checked", json!(qmax));
            r.check(
                "simplicial",
                "simplicial identities",
                failures.is_empty(),
                failures.first().cloned(),
            );
        }
        Payload::Algebra(_) => return Err(unsupported(job)),
    }
    Ok(())
}

fn emit_betti(spec: &ComplexSpec, opts: &RunOptions, r: &mut Report) -> CliResult<()> {
    let table = betti(spec)?;
    r.betti("betti", "cohomology", &table);
    if opts.reps {
        let mut all = serde_json::Map::new();
        for row in &table.rows {
            if row.h == 0 {
                continue;
            }
            let reps: Vec<String> = representatives(spec, row.degree)?
                .iter()
                .map(|e| e.to_string())
                .collect();
            for rep in &reps {
                r.line(format!("  H^{}: {rep}", row.degree));
            }
            all.insert(row.degree.to_string(), json!(reps));
        }
        r.field("representatives", serde_json::Value::Object(all));
    }
    Ok(())
}

fn run_betti(job: &JobSpec, opts: &RunOptions, r: &mut Report) -> CliResult<()> {
    let w = window(job);
    let spec = match &job.payload {
        Payload::LieAlgebra(g) => {
            let s = g.structure()?;
            match model_name(job, "ce", &["ce", "weil"])? {
                "ce" => weighted(job, ComplexSpec::new(build_differential(&s)?, w), None)?,
                _ => weighted(job, weil(&s)?.complex(w), None)?,
            }
        }
        Payload::Algebroid(a) => {
            let s = a.structure()?;
            jacobi_witness(&s)?;
            weighted(job, ComplexSpec::new(build_differential(&s)?, w), None)?
        }
        Payload::Action(g, act) => {
            let b = action_model(g, act)?;
            match model_name(job, "brst", &["brst", "cartan"])? {
                "brst" => weighted(job, b.complex(w, None), Some(b.weights()))?,
                _ => {
                    let c = cartan_model(&b)?;
                    weighted(job, c.complex(w, None), Some(c.weights.clone()))?
                }
            }
        }
        Payload::Ginzburg(..) => {
            let m = ginzburg_model(job)?.expect("ginzburg payload");
            weighted(
                job,
                ComplexSpec::new(m.total.clone(), w),
                Some(ginzburg_weights(&m)),
            )?
        }
        Payload::Groupoid(g) => {
            let Groupoid::Finite(f) = g.build()? else {
                return Err(CliError::parse("betti on a groupoid needs `mode: finite`"));
            };
            if w.0 < 0 {
                return Err(CliError::parse("groupoid cohomology lives in degrees ≥ 0"));
            }
            let dims = f.normalized_cohomology(w.1 as usize)?;
            let rows: Vec<_> = (w.0..=w.1).map(|n| (n, dims[n as usize])).collect();
            for (n, h) in &rows {
                r.line(format!("H^{n} = {h}"));
            }
            r.field(
                "betti",
                json!(rows
                    .iter()
                    .map(|(n, h)| json!({"degree": n, "h": h}))
                    .collect::<Vec<_>>()),
            );
            return Ok(());
        }
        Payload::Bialgebra(_) | Payload::Algebra(_) => return Err(unsupported(job)),
    };
    emit_betti(&spec, opts, r)
}

fn run_basic(job: &JobSpec, r: &mut Report) -> CliResult<()> {
    let w = window(job);
    let table = match &job.payload {
        Payload::LieAlgebra(g) => {
            let wa = weil(&g.structure()?)?;
            basic_betti(&weighted(job, wa.complex(w), None)?, &wa.contractions)?
        }
        Payload::Action(g, act) => {
            let b = action_model(g, act)?;
            match model_name(job, "cartan", &["brst", "cartan"])? {
                "brst" => basic_betti(
                    &weighted(job, b.complex(w, None), Some(b.weights()))?,
                    &b.contractions(),
                )?,
                _ => {
                    let c = cartan_model(&b)?;
                    betti(&weighted(job, c.complex(w, None), Some(c.weights.clone()))?)?
                }
            }
        }
        Payload::Ginzburg(..) => {
            let m = ginzburg_model(job)?.expect("ginzburg payload");
            betti(&weighted(job, m.basic_complex(w, None), Some(m.basic_weights()))?)?
        }
        _ => return Err(unsupported(job)),
    };
    r.betti("betti", "basic cohomology", &table);
    Ok(())
}

fn run_mqk(job: &JobSpec, r: &mut Report) -> CliResult<()> {
    let (lhs, rhs) = match &job.payload {
        Payload::Action(g, act) => {
            let b = action_model(g, act)?;
            let (lhs, rhs) = mqk(&b)?;
            r.check("brst", "d + L_{d_A} = D_B", rhs == b.d_b, None);
            (lhs, rhs)
        }
        Payload::Algebroid(a) => {
            let s = a.structure()?;
            jacobi_witness(&s)?;
            mqk_structure(&s)?
        }
        Payload::LieAlgebra(g) => mqk_structure(&g.structure()?)?,
        _ => return Err(unsupported(job)),
    };
    let witness = lhs
        .images()
        .iter()
        .zip(rhs.images())
        .enumerate()
        .find(|(_, (a, b))| a != b)
        .map(|(i, (a, b))| format!("on {}: {}", lhs.table().name(i), a - b));
    r.check("conjugation", "conjugation identity", witness.is_none(), witness);
    Ok(())
}

fn run_double(job: &JobSpec, r: &mut Report) -> CliResult<()> {
    let Payload::Bialgebra(b) = &job.payload else {
        return Err(unsupported(job));
    };
    let (c, gamma) = b.constants()?;
    let d = bialgebra_double(&c, &gamma)?;
    r.field("dimension", json!(c.len()));
    r.check("d_homological", "d² = 0", d.d.is_homological(), None);
    r.check("xi_homological", "Ξ² = 0", d.xi.is_homological(), None);
    r.check("compatible", "[d, Ξ] = 0", d.compatible, d.witness.clone());
    r.check("total_homological", "(d + Ξ)² = 0", d.total_homological, None);
    Ok(())
}

fn run_ginzburg(job: &JobSpec, r: &mut Report) -> CliResult<()> {
    let Some(m) = ginzburg_model(job)? else {
        return Err(unsupported(job));
    };
    let w = window(job);
    r.check(
        "homological",
        "total differential squares to zero",
        m.total.is_homological(),
        None,
    );
    let conj = conjugate(&m.untwisted, &m.q, CONJUGATION_CAP)?;
    let witness = conj
        .images()
        .iter()
        .zip(m.total.images())
        .enumerate()
        .find(|(_, (a, b))| a != b)
        .map(|(i, (a, b))| format!("on {}: {}", m.table.name(i), a - b));
    r.check(
        "conjugation",
        "exp(ad Q) untwisted = total",
        witness.is_none(),
        witness,
    );
    r.betti(
        "betti",
        "cohomology",
        &betti(&weighted(
            job,
            ComplexSpec::new(m.total.clone(), w),
            Some(ginzburg_weights(&m)),
        )?)?,
    );
    r.betti(
        "basic_betti",
        "basic cohomology",
        &betti(&weighted(job, m.basic_complex(w, None), Some(m.basic_weights()))?)?,
    );
    Ok(())
}

fn run_vanest(job: &JobSpec, opts: &RunOptions, r: &mut Report) -> CliResult<()> {
    let Payload::Groupoid(g) = &job.payload else {
        return Err(unsupported(job));
    };
    let Groupoid::Poly(gpd) = g.build()? else {
        return Err(CliError::parse("vanest needs `mode: poly_action`"));
    };
    let (chain, ring) = van_est_samples(&gpd, opts)?;
    r.field("seed", json!(opts.seed));
    r.field("samples", json!(opts.samples));
    for (key, label, (passed, witness)) in [
        ("chain", "chain property", chain),
        ("ring", "ring property", ring),
    ] {
        let detail = match witness {
            Some(w) => format!("{passed}/{} samples; {w}", opts.samples),
            None => format!("{passed}/{} samples", opts.samples),
        };
        r.check(key, label, passed == opts.samples, Some(detail));
    }
    Ok(())
}

type Tally = (usize, Option<String>);

fn van_est_samples(gpd: &PolyActionGroupoid, opts: &RunOptions) -> CliResult<(Tally, Tally)> {
    let s = gpd.algebroid()?;
    let d = build_differential(&s)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let (mut chain, mut ring): (Tally, Tally) = ((0, None), (0, None));
    for sample in 0..opts.samples {
        let level = rng.gen_range(0..=2);
        let f = gpd.random_normalized(&mut rng, level, 3)?;
        let lhs = gpd.van_est(&gpd.delta(&f)?, &s)?;
        let rhs = d.apply(&gpd.van_est(&f, &s)?)?;
        tally(&mut chain, lhs == rhs, || {
            format!("sample {sample}: V(δf) = {lhs}, d(Vf) = {rhs}")
        });
        let l2 = rng.gen_range(0..=2 - level);
        let g = gpd.random_normalized(&mut rng, l2, 3)?;
        let lhs = gpd.van_est(&gpd.cup(&f, &g)?, &s)?;
        let rhs = &gpd.van_est(&f, &s)? * &gpd.van_est(&g, &s)?;
        tally(&mut ring, lhs == rhs, || {
            format!("sample {sample}: V(f·g) = {lhs}, Vf·Vg = {rhs}")
        });
    }
    Ok((chain, ring))
}

fn tally(t: &mut Tally, ok: bool, witness: impl FnOnce() -> String) {
    if ok {
        t.0 += 1;
    } else if t.1.is_none() {
        t.1 = Some(witness());
    }
}

fn run_cartan_suite(job: &JobSpec, opts: &RunOptions, r: &mut Report) -> CliResult<()> {
    let Payload::Algebra(gens) = &job.payload else {
        return Err(unsupported(job));
    };
    let base: Arc<GeneratorTable> = GeneratorTable::new(gens.iter().map(|g| (g.name.clone(), g.degree)))?;
    let t = odd_tangent(&base)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut passes: Vec<(&'static str, usize, Option<String>)> = Vec::new();
    for sample in 0..opts.samples {
        let dx = rng.gen_range(-1..=1);
        let dy = rng.gen_range(-1..=1);
        let x = random::derivation(&mut rng, &base, dx, 2);
        let y = random::derivation(&mut rng, &base, dy, 2);
        let report = cartan_suite(&t, &x, &y)?;
        if passes.is_empty() {
            passes = report.relations.iter().map(|rel| (rel.name, 0, None)).collect();
        }
        for (slot, rel) in passes.iter_mut().zip(&report.relations) {
            if rel.passed {
                slot.1 += 1;
            } else if slot.2.is_none() {
                slot.2 = Some(format!(
                    "sample {sample}: {}",
                    rel.witness.clone().unwrap_or_default()
                ));
            }
        }
    }
    r.field("seed", json!(opts.seed));
    r.field("samples", json!(opts.samples));
    for (name, ok, witness) in passes {
        let detail = match witness {
            Some(w) => format!("{ok}/{} samples; {w}", opts.samples),
            None => format!("{ok}/{} samples", opts.samples),
        };
        r.check(name, name, ok == opts.samples, Some(detail));
    }
    Ok(())
}
