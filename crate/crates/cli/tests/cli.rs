//! Exit codes, determinism and command semantics through the real binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use curvlab_cli::report::ReportFile;
use curvlab_cli::spec::FieldSpecFile;
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn curvlab(args: &[&str]) -> Output {
    curvlab_env(args, None)
}

fn curvlab_env(args: &[&str], max_degree: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_curvlab"));
    cmd.args(args).env_remove("CURVLAB_MAX_DEGREE");
    if let Some(v) = max_degree {
        cmd.env("CURVLAB_MAX_DEGREE", v);
    }
    cmd.output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn report(out: &Output) -> ReportFile {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    ReportFile::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const CURVED: &str = r#"{"format_version": 1, "case": "connection", "base_dim": 2, "fiber_dim": 1,
  "components": {"A2:1,1": "x1"}}"#;
const FLAT: &str = r#"{"format_version": 1, "case": "connection", "base_dim": 2, "fiber_dim": 1,
  "components": {"A1:1,1": "x2", "A2:1,1": "x1"}}"#;

#[test]
fn output_is_deterministic() {
    let f = fixture("nijenhuis_hand.json");
    let a = curvlab(&["curvature", "--kind", "nijenhuis", path(&f)]);
    let b = curvlab(&["curvature", "--kind", "nijenhuis", path(&f)]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v1 = curvlab(&["verify", "--suite", "bianchi", "--seed", "7", "--count", "5"]);
    let v2 = curvlab(&["verify", "--suite", "bianchi", "--seed", "7", "--count", "5"]);
    assert_eq!(v1.stdout, v2.stdout);
}

#[test]
fn malformed_input_exits_2() {
    let d = TempDir::new().unwrap();
    let bad = write(&d, "bad.json", "{ not json");
    let out = curvlab(&["curvature", "--kind", "yangmills", "--point", "0,0", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
    let noversion = write(&d, "v.json", r#"{"case": "connection", "base_dim": 2, "fiber_dim": 1, "components": {}}"#);
    assert_eq!(curvlab(&["curvature", "--kind", "yangmills", &noversion]).status.code(), Some(2));
    let badpoly = write(&d, "p.json", &CURVED.replace("\"x1\"", "\"x1 +* 2\""));
    let out = curvlab(&["curvature", "--kind", "yangmills", &badpoly]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("A2:1,1"));
    assert_eq!(curvlab(&["curvature", "--kind", "nope", &badpoly]).status.code(), Some(2));
    assert_eq!(curvlab(&["curvature", "--kind", "riemann", path(&fixture("yangmills.json"))]).status.code(), Some(2));
    assert_eq!(curvlab(&["curvature", "--kind", "yangmills", "/nonexistent/file.json"]).status.code(), Some(2));
}

#[test]
fn invalid_section_exits_3() {
    let d = TempDir::new().unwrap();
    let j = write(
        &d,
        "j.json",
        r#"{"format_version": 1, "case": "acs", "base_dim": 2, "components": {"1,2": "-1", "2,1": "2"}}"#,
    );
    assert_eq!(curvlab(&["curvature", "--kind", "nijenhuis", &j]).status.code(), Some(3));
    let g = write(
        &d,
        "g.json",
        r#"{"format_version": 1, "case": "gauge", "base_dim": 2, "fiber_dim": 1, "components": {"1,1": "2"}}"#,
    );
    let c = write(&d, "c.json", CURVED);
    assert_eq!(curvlab(&["transform", "--by", &g, &c]).status.code(), Some(3));
}

#[test]
fn degenerate_metric_exits_4() {
    let d = TempDir::new().unwrap();
    let g = write(
        &d,
        "g.json",
        r#"{"format_version": 1, "case": "metric", "base_dim": 2, "components": {"1,1": "1", "2,2": "x1"}}"#,
    );
    assert_eq!(curvlab(&["curvature", "--kind", "riemann", "--point", "0,1", &g]).status.code(), Some(4));
    let r = report(&curvlab(&["curvature", "--kind", "riemann", "--point", "1,0", &g]));
    assert!(r.blocks.iter().any(|b| b.name == "R"));
}

#[test]
fn identity_gauge_leaves_components_unchanged() {
    let d = TempDir::new().unwrap();
    let c = write(&d, "c.json", &std::fs::read_to_string(fixture("yangmills.json")).unwrap());
    let id = write(
        &d,
        "id.json",
        r#"{"format_version": 1, "case": "gauge", "base_dim": 2, "fiber_dim": 1, "components": {"1,1": "1"}}"#,
    );
    let out = curvlab(&["transform", "--by", &id, &c]);
    assert!(out.status.success());
    let once = FieldSpecFile::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    let orig = FieldSpecFile::from_json(&std::fs::read_to_string(&c).unwrap()).unwrap();
    assert_eq!(once.components, orig.components);
    let again = write(&d, "again.json", std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(curvlab(&["transform", "--by", &id, &again]).stdout, out.stdout);
}

#[test]
fn pure_gauge_is_flat() {
    let d = TempDir::new().unwrap();
    let zero = write(
        &d,
        "zero.json",
        r#"{"format_version": 1, "case": "connection", "base_dim": 2, "fiber_dim": 2, "components": {}}"#,
    );
    let g = write(
        &d,
        "g.json",
        r#"{"format_version": 1, "case": "gauge", "base_dim": 2, "fiber_dim": 2,
            "components": {"1,1": "1", "1,2": "x1*x2 + x2^2", "2,2": "1"}}"#,
    );
    let out = curvlab(&["transform", "--by", &g, &zero]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let pure = FieldSpecFile::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert!(!pure.components.is_empty());
    let p = write(&d, "pure.json", std::str::from_utf8(&out.stdout).unwrap());
    let r = report(&curvlab(&["curvature", "--kind", "yangmills", &p]));
    assert_eq!(r.sup_norm, Some(0.0));
    assert!(r.blocks.iter().all(|b| b.components.is_empty()));
}

#[test]
fn equivalence_verdicts() {
    let d = TempDir::new().unwrap();
    let curved = write(&d, "curved.json", CURVED);
    let flat = write(&d, "flat.json", FLAT);
    let same = report(&curvlab(&["equivalence", "--point", "0,0", &curved, &curved]));
    assert_eq!(same.verdict.as_deref(), Some("equivalent-at-order-1"));
    let diff = report(&curvlab(&["equivalence", "--point", "0,0", &flat, &curved]));
    assert_eq!(diff.verdict.as_deref(), Some("obstructed"));
    assert_eq!(diff.differing, vec!["F".to_string()]);
    assert!(diff.sup_norm.unwrap() > 0.0);

    let g = write(
        &d,
        "g.json",
        r#"{"format_version": 1, "case": "gauge", "base_dim": 2, "fiber_dim": 1, "components": {"1,1": "2 + x1"},
            "inverse": {}}"#,
    );
    // scalar gauge 2 + x1 has no polynomial inverse; a constant one does
    assert_ne!(curvlab(&["transform", "--by", &g, &curved]).status.code(), Some(0));
    let c2 = write(
        &d,
        "c2.json",
        r#"{"format_version": 1, "case": "connection", "base_dim": 2, "fiber_dim": 2, "components": {"A2:1,1": "x1"}}"#,
    );
    let swap = write(
        &d,
        "swap.json",
        r#"{"format_version": 1, "case": "gauge", "base_dim": 2, "fiber_dim": 2, "components": {"1,2": "1", "2,1": "1"},
            "inverse": {"1,2": "1", "2,1": "1"}}"#,
    );
    let moved = curvlab(&["transform", "--by", &swap, &c2]);
    assert!(moved.status.success(), "{}", String::from_utf8_lossy(&moved.stderr));
    let moved = write(&d, "moved.json", std::str::from_utf8(&moved.stdout).unwrap());
    let r = report(&curvlab(&["equivalence", "--point", "1/2,-1", &c2, &moved]));
    assert_eq!(r.verdict.as_deref(), Some("equivalent-at-order-1"));
    assert!(r.blocks.iter().any(|b| b.name == "conjugator"));

    let acs = fixture("nijenhuis_hand.json");
    assert_eq!(curvlab(&["equivalence", "--point", "0,0", &curved, path(&acs)]).status.code(), Some(2));
}

#[test]
fn degree_cap_from_environment() {
    let f = fixture("nijenhuis_hand.json");
    assert!(curvlab_env(&["curvature", "--kind", "nijenhuis", path(&f)], Some("2")).status.success());
    assert_eq!(curvlab_env(&["curvature", "--kind", "nijenhuis", path(&f)], Some("1")).status.code(), Some(2));
    assert_eq!(curvlab_env(&["curvature", "--kind", "nijenhuis", path(&f)], Some("lots")).status.code(), Some(2));
}

#[test]
fn out_flag_writes_the_report() {
    let d = TempDir::new().unwrap();
    let target = d.path().join("r.json");
    let f = fixture("yangmills.json");
    let out = curvlab(&["curvature", "--kind", "yangmills", "--out", path(&target), path(&f)]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let stdout = curvlab(&["curvature", "--kind", "yangmills", path(&f)]).stdout;
    assert_eq!(std::fs::read(&target).unwrap(), stdout);
}

#[test]
fn verify_examples() {
    for (suite, count) in [("bianchi", "50"), ("oracle-fd", "20"), ("splitting", "5")] {
        let out = curvlab(&["verify", "--suite", suite, "--count", count]);
        let r = report(&out);
        assert!(r.failure.is_none());
        assert!(r.properties.iter().all(|p| p.passed), "{suite}");
        assert_eq!(r.operation.suite.as_deref(), Some(suite));
    }
    let r = report(&curvlab(&["verify", "--suite", "weyl", "--count", "0"]));
    assert!(r.properties.iter().all(|p| p.instances == 1));
}

#[test]
fn a_single_instance_replays_from_its_seed() {
    let wide = report(&curvlab(&["verify", "--suite", "gauge", "--seed", "40", "--count", "3"]));
    assert_eq!(wide.properties[0].instances, 3);
    let one = report(&curvlab(&["verify", "--suite", "gauge", "--seed", "42", "--count", "1"]));
    assert_eq!(one.properties[0].instances, 1);
    let direct = curvlab_cli::verify::instance(curvlab_cli::verify::Suite::Gauge, 42).unwrap();
    assert!(direct.checks.iter().all(|c| c.passed));
}
