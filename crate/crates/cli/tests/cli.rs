use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn rsfourier(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rsfourier")).args(args).output().expect("binary runs")
}

fn report(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn theorem3_defaults_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t3.json");
    let run = rsfourier(&["verify", "theorem3", "--out", out.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let r = report(&out);
    assert_eq!(r["pass"], true);
    let series: Vec<&Value> =
        r["cases"].as_array().unwrap().iter().filter(|c| c["name"] == "closed form against truncated series").collect();
    assert_eq!(series.len(), 8);
    assert!(series.iter().all(|c| c["inputs"]["residuals"].as_array().unwrap().len() == 3));
}

#[test]
fn lemmas_report_contains_worked_sum() {
    let run = rsfourier(&["verify", "lemmas"]);
    assert_eq!(run.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&run.stdout).unwrap();
    let worked = r["cases"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "euler summation" && c["inputs"]["function"] == "u" && c["inputs"]["b"] == 5.5)
        .unwrap();
    assert_eq!(worked["lhs"], 15.0);
    assert_eq!(worked["pass"], true);
}

#[test]
fn non_periodic_two_sided_case_fails_with_precondition() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(
        &cfg,
        r#"
[theorem1]
functions = ["ramp"]
both_functions = ["ramp"]
points = [0.5]
cesaro_functions = []
local = []

[[function]]
name = "ramp"
domain = [0.0, 1.0]
pieces = [{ lo = 0.0, hi = 1.0, expr = "2*u", deriv = "2" }]
breakpoints = [{ x = 0.0, right = 0.0, at = 0.0 }, { x = 1.0, left = 2.0, at = 2.0 }]
"#,
    )
    .unwrap();
    let run = rsfourier(&["verify", "theorem1", "--config", cfg.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(1));
    let r: Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(r["pass"], false);
    let failed: Vec<&Value> = r["cases"].as_array().unwrap().iter().filter(|c| c["pass"] == false).collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().all(|c| c["error"].as_str().unwrap().contains("precondition")));
}

#[test]
fn parse_and_io_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("broken.toml");
    std::fs::write(&cfg, "seed = \"x\"").unwrap();
    assert_eq!(rsfourier(&["verify", "lemmas", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(rsfourier(&["verify", "lemmas", "--config", "/nonexistent/cfg.toml"]).status.code(), Some(2));
    std::fs::write(&cfg, "[theorem2]\nfunctions = [\"nope\"]").unwrap();
    assert_eq!(rsfourier(&["verify", "theorem2", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(rsfourier(&["verify", "nonsense"]).status.code(), Some(2));
    let unwritable = dir.path().join("missing-dir").join("out.csv");
    let run = rsfourier(&["sweep", "psi_series", "--out", unwritable.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(2));
    assert_eq!(rsfourier(&["table", "psi_rq", "--q", "2", "--r", "3"]).status.code(), Some(2));
    assert_eq!(rsfourier(&["verify", "lemmas", "--tol", "-1"]).status.code(), Some(2));
}

#[test]
fn sweeps_are_deterministic_csv() {
    let a = rsfourier(&["sweep", "cesaro", "--function", "sawtooth", "--point", "0"]);
    let b = rsfourier(&["sweep", "cesaro", "--function", "sawtooth", "--point", "0"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,residual"));
    let orders: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(orders, ["100", "1000", "10000"]);

    let psi = rsfourier(&["sweep", "psi_series", "--q", "2", "--r", "1", "--u", "0.3", "--orders", "100,1000,10000"]);
    let residuals: Vec<f64> = String::from_utf8(psi.stdout)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(residuals[0] > residuals[1] && residuals[1] > residuals[2], "{residuals:?}");
}

#[test]
fn table_rows() {
    let run = rsfourier(&["table", "psi_rq", "--q", "4", "--r", "1"]);
    assert_eq!(run.status.code(), Some(0));
    let text = String::from_utf8(run.stdout).unwrap();
    let c: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(c[0], "c");
    assert_eq!(c[4].parse::<f64>().unwrap(), 0.125);
    assert_eq!(text.lines().filter(|l| l.starts_with("step,")).count(), 4);
    assert_eq!(text.lines().filter(|l| l.starts_with("jump,")).count(), 3);

    let saw = String::from_utf8(rsfourier(&["table", "psi_rq", "--q", "2", "--r", "2"]).stdout).unwrap();
    assert!(saw.lines().nth(1).unwrap().starts_with("sawtooth,"));
}
