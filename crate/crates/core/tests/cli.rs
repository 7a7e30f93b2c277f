use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_isoparam"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn surface(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("surfaces")
        .join(name)
        .display()
        .to_string()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn validate(report: &Value) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schema/report.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(report).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
}

#[test]
fn verify_chen_json() {
    let out = run(&["verify", "chen", "--c", "-4", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    validate(&r);
    let k = r["residuals"]["kaehler_angle"].as_f64().unwrap();
    assert!((k - (1.0f64 / 3.0).acos()).abs() < 1e-6);
    assert!(out.stdout.windows(20).any(|w| w == b"\"kaehler_angle\": 1.2"));
    assert_eq!(r["pass"], Value::Bool(true));
    assert_eq!(r["runtime_ms"], Value::Null);
}

#[test]
fn verify_rh2() {
    let out = run(&["verify", "rh2", "--c", "-4", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    validate(&r);
    assert_eq!(r["verdict"], "NOT_TERNG");
    assert!((r["residuals"]["normal_curvature"].as_f64().unwrap() + 1.0).abs() < 1e-6);
}

#[test]
fn configuration_errors_exit_2() {
    assert_eq!(run(&["verify", "all", "--c", "0"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "nowhere"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "chen", "--grid", "2"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "chen", "--tol-alg", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "rh2", "--c", "4"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn verify_positive_curvature_reports_the_obstruction() {
    let out = run(&["verify", "chen", "--c", "4", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    validate(&r);
    assert!((r["residuals"]["obstruction"].as_f64().unwrap() - 8.0).abs() < 1e-12);
}

#[test]
fn csv_has_a_fixed_header() {
    let out = run(&["verify", "circle", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "target,kind,name,value,expected,tolerance,pass");
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    assert!(rd.records().all(|r| r.unwrap().len() == 7));
}

#[test]
fn out_flag_and_timing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&["verify", "sphere", "--format", "json", "--timing", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    validate(&r);
    assert!(r["runtime_ms"].is_u64());
}

#[test]
fn check_surface_files() {
    let chen = surface("chen.toml");
    let out = run(&["check-surface", &chen, "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    validate(&r);
    assert_eq!(r["verdict"], "CHEN_LIKE");
    assert!(r["shape_report"]["pass"].as_bool().unwrap());

    let out = run(&["check-surface", &surface("circle.toml"), "--expect", "CIRCLE_LIKE", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    validate(&r);
    assert_eq!(r["verdict"], "CIRCLE_LIKE");

    let out = run(&["check-surface", &chen, "--expect", "not_terng"]);
    assert_eq!(out.status.code(), Some(1));

    let out = run(&["check-surface", &surface("malformed.toml")]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 6, column"), "{err}");

    assert_eq!(run(&["check-surface", "/nonexistent.toml"]).status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let a = run(&["verify", "chen", "--format", "json", "--seed", "7"]);
    let b = run(&["verify", "chen", "--format", "json", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
}
