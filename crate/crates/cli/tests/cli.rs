use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const SO3: &str = r#"{"lie_algebra": {"basis": [{"name": "e1"}, {"name": "e2"}, {"name": "e3"}],
  "brackets": [{"i": 1, "j": 2, "coeffs": {"e3": 1}},
               {"i": 2, "j": 3, "coeffs": {"e1": 1}},
               {"i": 3, "j": 1, "coeffs": {"e2": 1}}]},
  "window": [0, 3]}"#;

const ROTATION: &str = r#"{"lie_algebra": {"basis": [{"name": "v"}]},
  "action": {"manifold": ["x", "y"],
             "vector_fields": {"v": {"x": {"0,1": -1}, "y": {"1,0": 1}}}},
  "window": [0, 4]}"#;

const HEISENBERG_GROUP: &str = r#"{"groupoid": {"mode": "poly_action", "base_dim": 0, "group_dim": 3,
  "mu": [{"1,0,0,0,0,0": 1, "0,0,0,1,0,0": 1},
         {"0,1,0,0,0,0": 1, "0,0,0,0,1,0": 1},
         {"0,0,1,0,0,0": 1, "0,0,0,0,0,1": 1, "1,0,0,0,1,0": 1}]}}"#;

const PLANE_ROTATION: &str = r#"{"algebroid": {"base": ["x0", "x1"],
  "basis": [{"name": "a0"}, {"name": "a1"}],
  "anchor": {"a0": {"x0": 1}, "a1": {"x1": 1}}},
  "lie_algebra": {"basis": [{"name": "v"}]},
  "premoment": {"v": {"a0": {"0,1": -1}, "a1": {"1,0": 1}}},
  "window": [0, 3]}"#;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

struct Jobs {
    dir: TempDir,
}

impl Jobs {
    fn new() -> Self {
        Jobs {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn file(&self, name: &str, body: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    }

    fn run(&self, kind: &str, name: &str, body: &str, extra: &[&str]) -> Run {
        let p = self.file(name, body);
        let out: Output = Command::new(env!("CARGO_BIN_EXE_qforms"))
            .arg(kind)
            .arg(&p)
            .args(extra)
            .output()
            .unwrap();
        Run {
            code: out.status.code().unwrap(),
            stdout: String::from_utf8(out.stdout).unwrap(),
            stderr: String::from_utf8(out.stderr).unwrap(),
        }
    }
}

fn h_column(v: &Value, key: &str) -> Vec<u64> {
    v[key]
        .as_array()
        .unwrap()
        .iter()
        .map(|row| row["h"].as_u64().unwrap())
        .collect()
}

fn json(run: &Run) -> Value {
    serde_json::from_str(&run.stdout).unwrap()
}

#[test]
fn so3_chevalley_eilenberg() {
    let j = Jobs::new();
    let r = j.run("betti", "so3.json", SO3, &["--json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(h_column(&json(&r), "betti"), vec![1, 0, 0, 1]);
}

#[test]
fn so3_weil_and_basic() {
    let j = Jobs::new();
    let weil = SO3.replace("\"window\"", "\"model\": \"weil\", \"window\"");
    let r = j.run("betti", "weil.json", &weil, &["--json"]);
    assert_eq!(h_column(&json(&r), "betti"), vec![1, 0, 0, 0]);
    let r = j.run("basic", "so3.json", SO3, &["--json", "--window", "0..4"]);
    assert_eq!(h_column(&json(&r), "betti"), vec![1, 0, 0, 0, 1]);
}

#[test]
fn representatives_are_printed() {
    let j = Jobs::new();
    let r = j.run("betti", "so3.json", SO3, &["--reps"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("H^0: 1"), "{}", r.stdout);
    assert!(r.stdout.contains("H^3:"), "{}", r.stdout);
}

#[test]
fn jacobi_failure_names_the_triple() {
    let j = Jobs::new();
    let bad = SO3.replace(r#"{"e3": 1}"#, r#"{"e3": 1, "e1": 1}"#);
    let r = j.run("check", "bad.json", &bad, &[]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("triple (e1, e2, e3)"), "{}", r.stderr);
}

#[test]
fn rescaled_so3_is_still_lie() {
    let j = Jobs::new();
    let scaled = SO3.replace(r#"{"e3": 1}"#, r#"{"e3": 2}"#);
    let r = j.run("check", "scaled.json", &scaled, &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("Jacobi identity: PASS"));
}

#[test]
fn missing_window_is_a_parse_error() {
    let j = Jobs::new();
    let r = j.run(
        "betti",
        "nowin.json",
        &SO3.replace(r#""window": [0, 3]"#, r#""model": "ce""#),
        &[],
    );
    assert_eq!(r.code, 4);
    assert!(r.stderr.contains("window"));
}

#[test]
fn malformed_json_reports_position() {
    let j = Jobs::new();
    let r = j.run("check", "broken.json", "{\n  \"window\": [0,\n", &[]);
    assert_eq!(r.code, 4);
    assert!(r.stderr.contains("line 3"), "{}", r.stderr);
}

#[test]
fn unknown_fields_and_kind_mismatch_are_rejected() {
    let j = Jobs::new();
    let r = j.run(
        "check",
        "extra.json",
        &SO3.replace("\"window\"", "\"colour\": 1, \"window\""),
        &[],
    );
    assert_eq!(r.code, 4);
    let r = j.run(
        "check",
        "kind.json",
        &SO3.replace("\"window\"", "\"kind\": \"betti\", \"window\""),
        &[],
    );
    assert_eq!(r.code, 4);
    assert!(r.stderr.contains("declares kind"));
}

#[test]
fn unbounded_basis_is_an_engine_error() {
    let j = Jobs::new();
    let r = j.run("betti", "rot.json", ROTATION, &[]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("infinite basis"));
}

#[test]
fn circle_action_equivariant_cohomology() {
    let j = Jobs::new();
    let r = j.run("betti", "rot.json", ROTATION, &["--json", "--weight", "0"]);
    assert_eq!(h_column(&json(&r), "betti"), vec![1, 0, 0, 0, 0]);
    let cartan = ROTATION.replace("\"window\"", "\"model\": \"cartan\", \"window\"");
    let r = j.run("betti", "cartan.json", &cartan, &["--json", "--weight", "0"]);
    assert_eq!(h_column(&json(&r), "betti"), vec![1, 0, 1, 0, 1]);
    let r = j.run("basic", "rot.json", ROTATION, &["--json", "--weight", "0"]);
    assert_eq!(h_column(&json(&r), "betti"), vec![1, 0, 1, 0, 1]);
    let brst = ROTATION.replace("\"window\"", "\"model\": \"brst\", \"window\"");
    let r = j.run("basic", "brst.json", &brst, &["--json", "--weight", "0"]);
    assert_eq!(h_column(&json(&r), "betti"), vec![1, 0, 1, 0, 1]);
}

#[test]
fn non_action_is_a_validation_error() {
    let j = Jobs::new();
    let body = ROTATION.replace(
        r#"{"name": "v"}]}"#,
        r#"{"name": "v"}, {"name": "w"}], "brackets": [{"i": "v", "j": "w", "coeffs": {"v": 1}}]}"#,
    );
    let r = j.run("check", "notact.json", &body, &[]);
    assert_eq!(r.code, 2, "{}", r.stderr);
    assert!(r.stderr.contains("[v, w]"), "{}", r.stderr);
}

#[test]
fn mqk_conjugation_passes() {
    let j = Jobs::new();
    let r = j.run("mqk", "rot.json", ROTATION, &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("conjugation identity: PASS"));
    let r = j.run("mqk", "so3.json", SO3, &[]);
    assert!(r.stdout.contains("conjugation identity: PASS"));
}

#[test]
fn van_est_is_seeded_and_passes() {
    let j = Jobs::new();
    let a = j.run("vanest", "h.json", HEISENBERG_GROUP, &["--seed", "7"]);
    let b = j.run("vanest", "h.json", HEISENBERG_GROUP, &["--seed", "7"]);
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
    assert!(a.stdout.contains("chain property: PASS (25/25 samples)"));
    assert!(a.stdout.contains("ring property: PASS (25/25 samples)"));
    let r = j.run("check", "h.json", HEISENBERG_GROUP, &[]);
    assert!(r.stdout.contains("simplicial identities: PASS"));
}

#[test]
fn non_associative_law_is_rejected() {
    let j = Jobs::new();
    let body = HEISENBERG_GROUP.replace(r#""1,0,0,0,1,0": 1"#, r#""1,0,0,0,1,0": 1, "2,0,0,0,0,0": 1"#);
    let r = j.run("check", "bad.json", &body, &[]);
    assert_eq!(r.code, 2, "{}", r.stderr);
}

#[test]
fn finite_groups() {
    let j = Jobs::new();
    let z2 = r#"{"groupoid": {"mode": "finite",
      "group": {"elements": ["e", "s"], "table": [["e", "s"], ["s", "e"]]}}}"#;
    let r = j.run("betti", "z2.json", z2, &["--json", "--window", "0..3"]);
    assert_eq!(h_column(&json(&r), "betti"), vec![1, 0, 0, 0]);
    let r = j.run("check", "z2.json", z2, &[]);
    assert!(r.stdout.contains("simplicial identities: PASS"));
    let bad = z2.replace(r#"[["e", "s"], ["s", "e"]]"#, r#"[["e", "s"], ["s", "s"]]"#);
    let r = j.run("check", "bad.json", &bad, &[]);
    assert_eq!(r.code, 2, "{}", r.stderr);
}

#[test]
fn bialgebra_double() {
    let j = Jobs::new();
    let so3 = r#"[{"i": 1, "j": 2, "coeffs": {"3": 1}}, {"i": 2, "j": 3, "coeffs": {"1": 1}},
                  {"i": 3, "j": 1, "coeffs": {"2": 1}}]"#;
    let zero = format!(r#"{{"bialgebra": {{"dimension": 3, "c": {so3}, "gamma": []}}}}"#);
    let r = j.run("double", "ok.json", &zero, &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("(d + Ξ)² = 0: PASS"));
    let bad = format!(
        r#"{{"bialgebra": {{"dimension": 3, "c": {so3}, "gamma": [{{"i": 1, "j": 2, "coeffs": {{"3": 2}}}}]}}}}"#
    );
    let r = j.run("double", "bad.json", &bad, &[]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("[d,Ξ]("), "{}", r.stderr);
}

#[test]
fn cartan_suite_passes() {
    let j = Jobs::new();
    let body = r#"{"algebra": [{"name": "u", "degree": 0}, {"name": "w", "degree": 1}]}"#;
    let r = j.run("cartan-suite", "a.json", body, &["--samples", "8", "--json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = json(&r);
    assert_eq!(v["samples"], 8);
    assert_eq!(v["passed"], true);
}

#[test]
fn ginzburg_plane_rotation() {
    let j = Jobs::new();
    let r = j.run("ginzburg", "g.json", PLANE_ROTATION, &["--json", "--weight", "0"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = json(&r);
    assert_eq!(v["conjugation"], true);
    assert_eq!(h_column(&v, "betti"), vec![1, 0, 0, 0]);
    assert_eq!(h_column(&v, "basic_betti"), vec![1, 0, 1, 0]);
    let r = j.run(
        "basic",
        "g.json",
        PLANE_ROTATION,
        &["--json", "--weight", "0", "--window", "0..4"],
    );
    assert_eq!(h_column(&json(&r), "betti"), vec![1, 0, 1, 0, 1]);
}

#[test]
fn json_output_is_deterministic() {
    let j = Jobs::new();
    let a = j.run("ginzburg", "g.json", PLANE_ROTATION, &["--json", "--weight", "0"]);
    let b = j.run("ginzburg", "g.json", PLANE_ROTATION, &["--json", "--weight", "0"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn negative_window_and_bad_flags() {
    let j = Jobs::new();
    let r = j.run("betti", "so3.json", SO3, &["--json", "--window", "-1..1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(h_column(&json(&r), "betti"), vec![0, 1, 0]);
    let r = j.run("betti", "so3.json", SO3, &["--frobnicate"]);
    assert_eq!(r.code, 4);
}
