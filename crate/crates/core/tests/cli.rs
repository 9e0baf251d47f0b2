use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hubnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hubnet"))
        .args(args)
        .output()
        .expect("spawn hubnet")
}

fn error_kind(out: &Output) -> String {
    let err: Value = serde_json::from_slice(&out.stderr).expect("stderr is JSON");
    err["error"]["kind"].as_str().unwrap().to_string()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn unknown_scenario_is_an_invalid_spec() {
    let out = hubnet(&["bench", "--scenario", "z", "--reps", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "InvalidSpec");
}

#[test]
fn bad_flags_exit_with_usage_error() {
    let out = hubnet(&["bench", "--scenario", "a", "--reps", "many"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "Usage");
}

#[test]
fn simulate_then_fit() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    let out = hubnet(&[
        "simulate", "--scenario", "a", "--n", "40", "--p", "25", "--s", "3", "--seed", "1", "--out",
        path(&sim),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["x_train.csv", "y_train.csv", "x_test.csv", "y_test.csv", "sim.json"] {
        assert!(sim.join(name).exists(), "missing {name}");
    }
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(sim.join("sim.json")).unwrap()).unwrap();
    assert_eq!(meta["true_support"], serde_json::json!([0, 1, 2]));

    let fit_json = dir.path().join("fit.json");
    let out = hubnet(&[
        "fit",
        "--x",
        path(&sim.join("x_train.csv")),
        "--y",
        path(&sim.join("y_train.csv")),
        "--method",
        "hubnet",
        "--folds",
        "5",
        "--out",
        path(&fit_json),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let fit: Value = serde_json::from_str(&std::fs::read_to_string(&fit_json).unwrap()).unwrap();
    let body = fit.as_object().unwrap();
    assert!(body.contains_key("hub"), "keys: {:?}", body.keys().collect::<Vec<_>>());
}

#[test]
fn config_file_supplies_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out_csv = dir.path().join("table.csv");
    std::fs::write(
        &cfg,
        serde_json::json!({
            "command": "bench",
            "scenario": "b",
            "n": 40,
            "p": 20,
            "s": 2,
            "reps": 1,
            "methods": "lasso,elasticnet",
            "folds": 4,
        })
        .to_string(),
    )
    .unwrap();
    let out = hubnet(&["--config", path(&cfg), "--out", path(&out_csv)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = std::fs::read_to_string(&out_csv).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("method,cvm,cvm_se,fn,fp,features,test_error,test_error_se"));
    let methods: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(methods, ["elasticnet", "lasso"]);
}

#[test]
fn paths_csv_has_one_row_per_lambda() {
    let dir = tempfile::tempdir().unwrap();
    let out_csv = dir.path().join("paths.csv");
    let out = hubnet(&[
        "paths", "--scenario", "d", "--n", "50", "--p", "12", "--s", "3", "--method", "lasso", "--folds", "5",
        "--out",
        path(&out_csv),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = std::fs::read_to_string(&out_csv).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("lambda,nonzero,fp,fn"));
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(&first[1..], [0.0, 0.0, 1.0]);
}
