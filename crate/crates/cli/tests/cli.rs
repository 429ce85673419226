use std::fs;
use std::process::{Command, Output};

use resilife::verify::{parse_csv, Overall, Report};

fn resilife(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_resilife"))
        .args(args)
        .env_remove("RESILIFE_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn list_shows_the_catalog() {
    let o = resilife(&["list"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().count() >= 20);
    assert!(text.lines().any(|l| l.starts_with("CE5.1 ")));
    assert!(text.lines().any(|l| l.starts_with("T6.6 ")));
}

#[test]
fn run_dmrl_counterexample_as_json() {
    let o = resilife(&["run", "CE5.1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let r = Report::from_json(&stdout(&o)).unwrap();
    assert_eq!(r.overall, Overall::Pass);
    assert!((r.values["mrl*(0.002)"] - 0.151961).abs() < 2e-3);
    assert!((r.values["mrl*(0.004)"] - 0.15293).abs() < 2e-3);
}

#[test]
fn run_with_tolerance_flag() {
    assert_eq!(resilife(&["run", "T5.2", "--tol", "1e-7"]).status.code(), Some(0));
}

#[test]
fn exit_codes() {
    let o = resilife(&["run", "nosuch"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nosuch"));
    assert_eq!(resilife(&["run", "CE4.1"]).status.code(), Some(1));
    assert_eq!(resilife(&["run", "T5.2", "--tol", "-1"]).status.code(), Some(2));
    assert_eq!(resilife(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn seed_flag_beats_environment() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_resilife"));
        c.args(["run", "C4.2-mc", "--format", "json"]);
        if let Some(f) = flag {
            c.args(["--seed", f]);
        }
        match env {
            Some(e) => c.env("RESILIFE_SEED", e),
            None => c.env_remove("RESILIFE_SEED"),
        };
        let o = c.output().unwrap();
        Report::from_json(&String::from_utf8(o.stdout).unwrap()).unwrap()
    };
    let from_env = run(Some("5"), None);
    let from_flag = run(None, Some("5"));
    let both = run(Some("9"), Some("5"));
    assert_eq!(from_env.seed, from_flag.seed);
    assert_eq!(both.seed, from_flag.seed);
    assert_eq!(both.values, from_flag.values);
    assert_ne!(run(None, None).seed, from_flag.seed);
    let mut c = Command::new(env!("CARGO_BIN_EXE_resilife"));
    let bad = c.args(["run", "T5.2"]).env("RESILIFE_SEED", "abc").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn csv_report_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let o = resilife(&["run", "T4.3ii", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let parsed = parse_csv(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(parsed.len(), 1);
    assert_eq!(parsed[0].overall, Overall::Pass);
    assert_eq!(parsed[0].conclusions.len(), 3);
}

#[test]
fn config_file_runs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    fs::write(
        &path,
        r#"{
  "baseline": "hyperexp(0.25:1,0.75:2)",
  "mixing": "cont(exp(2))",
  "mixing2": "cont(exp(1))",
  "checks": ["DFR(X*)", "HR(X1*, X2*)", "!IFR(X2*)", "PLRD(X*)"],
  "grid": {"min": 0.001, "max": 10, "points": 100}
}"#,
    )
    .unwrap();
    let o = resilife(&["run", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let r = Report::from_json(&stdout(&o)).unwrap();
    assert_eq!(r.conclusions.len(), 4);
}

#[test]
fn config_parse_error_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{\n  \"baseline\": \"exp(1)\",\n  \"mixing\": degenerate\n}").unwrap();
    let o = resilife(&["run", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr).to_string();
    assert!(err.contains("line 3"), "{err}");
    assert!(err.contains("column"), "{err}");

    fs::write(&path, r#"{"baseline": "exp(1)", "mixing": "degenerate(1)", "checks": ["FOO(X)"]}"#).unwrap();
    assert_eq!(resilife(&["run", path.to_str().unwrap()]).status.code(), Some(2));
}

fn grid_rows(args: &[&str]) -> Vec<Vec<String>> {
    let o = resilife(args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    stdout(&o).lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn grid_exponential_columns_match() {
    let rows = grid_rows(&[
        "grid", "--baseline", "exp(1)", "--mixing", "cont(exp(1))", "--quantities", "sf",
        "--grid-min", "0", "--grid-max", "5", "--grid-points", "51",
    ]);
    assert_eq!(rows[0], ["x", "sf_X", "sf_Xstar"]);
    assert_eq!(rows.len(), 52);
    for r in &rows[1..] {
        let (a, b): (f64, f64) = (r[1].parse().unwrap(), r[2].parse().unwrap());
        assert!((a - b).abs() < 1e-8);
        let mantissa = r[1].split('e').next().unwrap();
        assert_eq!(mantissa.trim_start_matches('-').replace('.', "").len(), 12);
    }
}

#[test]
fn grid_shows_the_mrl_dip() {
    let rows = grid_rows(&[
        "grid", "--baseline", "weibull(2,0.4472135954999579)", "--mixing", "cont(exp(1))",
        "--quantities", "mrl", "--grid-min", "0", "--grid-max", "0.01", "--grid-points", "6",
    ]);
    let at = |x: f64| -> f64 {
        rows[1..]
            .iter()
            .find(|r| (r[0].parse::<f64>().unwrap() - x).abs() < 1e-12)
            .unwrap()[2]
            .parse()
            .unwrap()
    };
    assert!(at(0.004) > at(0.002));
    assert!((at(0.002) - 0.151961).abs() < 2e-3);
}

#[test]
fn grid_rejects_bad_specs() {
    assert_eq!(resilife(&["grid", "--baseline", "exp(-1)", "--mixing", "degenerate(1)"]).status.code(), Some(2));
    assert_eq!(resilife(&["grid", "--baseline", "exp(1)", "--mixing", "wat"]).status.code(), Some(2));
    assert_eq!(
        resilife(&["grid", "--baseline", "exp(1)", "--mixing", "degenerate(1)", "--quantities", "nope"]).status.code(),
        Some(2)
    );
}
