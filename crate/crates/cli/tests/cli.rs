use std::path::Path;
use std::process::{Command, Output};

use boundbell::format::{operator_from_json, operator_to_json};
use boundbell::states::{rho_n, RhoFamilySpec};
use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boundbell"))
        .args(args)
        .current_dir(dir)
        .env_remove("BOUNDBELL_TOL")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn state_writes_operator_and_ghz() {
    let dir = tempfile::tempdir().unwrap();
    let report = json(&run(dir.path(), &["state", "--n", "4", "--alpha", "auto"]));
    assert_eq!(report["blocks"], 9);
    assert_eq!(report["nonzeros"], 12);
    assert!((f(&report["config"]["alpha"]) - 3.0 * std::f64::consts::PI / 4.0).abs() < 1e-15);

    let text = std::fs::read_to_string(dir.path().join("rho_N4.json")).unwrap();
    let loaded = operator_from_json(&text).unwrap();
    let direct = rho_n(&RhoFamilySpec::with_default_alpha(4).unwrap()).unwrap();
    assert_eq!(loaded.matrix(), direct.matrix());
    assert_eq!(operator_to_json(&loaded), text);
    assert!(dir.path().join("rho_N4.ghz.json").exists());
}

#[test]
fn state_rejects_out_of_range() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["state", "--n", "1"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["state", "--n", "13"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["state"]).status.code(), Some(2));
}

#[test]
fn state_unwritable_path_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["state", "--n", "3", "--out", "missing/dir/rho.json"]);
    assert!(!out.status.success());
}

#[test]
fn scan_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let six = json(&run(dir.path(), &["scan", "--n", "6"]));
    assert_eq!(six["npt_pairs"], true);
    assert_eq!(six["N"], 6);
    // sizes 1..=3 of 6 parties
    assert_eq!(six["reports"].as_array().unwrap().len(), 6 + 15 + 20);

    let four = json(&run(dir.path(), &["scan", "--n", "4", "--tol", "1e-9"]));
    assert_eq!(four["ppt_single"], true);
    assert_eq!(four["bound_entangled_claim"], true);
    let first = &four["reports"][0];
    assert_eq!(first["subset"], serde_json::json!([1]));
    assert_eq!(first["verdict"], "PSD");
}

#[test]
fn scan_maximally_mixed_file_is_all_ppt() {
    let dir = tempfile::tempdir().unwrap();
    let entries: Vec<String> = (0..8).map(|i| format!("[{i},{i},0.125,0.0]")).collect();
    let text = format!(r#"{{"dims":[2,2,2],"entries":[{}]}}"#, entries.join(","));
    std::fs::write(dir.path().join("mixed.json"), text).unwrap();
    let report = json(&run(dir.path(), &["scan", "--input", "mixed.json"]));
    assert_eq!(report["all_ppt"], true);
    assert_eq!(report["alpha"], Value::Null);
}

#[test]
fn scan_malformed_input_fails() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{\"dims\": [2]").unwrap();
    assert_eq!(run(dir.path(), &["scan", "--input", "bad.json"]).status.code(), Some(2));
}

#[test]
fn scan_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["scan", "--n", "4", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# {"));
    assert!(lines[1].contains("bound_entangled_claim=true"));
    assert_eq!(lines[2], "subset,min_eig,verdict");
    assert_eq!(lines.len(), 3 + 4 + 6);
    assert!(lines.iter().any(|l| l.starts_with("1 2,") && l.ends_with("NOT_PSD")));
}

#[test]
fn tolerance_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_boundbell"))
        .args(["scan", "--n", "3"])
        .current_dir(dir.path())
        .env("BOUNDBELL_TOL", "1e-6")
        .output()
        .unwrap();
    assert_eq!(json(&out)["config"]["tol"], 1e-6);
    let flag = Command::new(env!("CARGO_BIN_EXE_boundbell"))
        .args(["scan", "--n", "3", "--tol", "1e-7"])
        .current_dir(dir.path())
        .env("BOUNDBELL_TOL", "1e-6")
        .output()
        .unwrap();
    assert_eq!(json(&flag)["config"]["tol"], 1e-7);
}

#[test]
fn bell_xy_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let eight = json(&run(dir.path(), &["bell", "--n", "8", "--settings", "xy"]));
    assert!((f(&eight["value"]) - 2f64.powf(3.5) / 9.0).abs() < 1e-10);
    assert_eq!(eight["violation"], true);
    assert_eq!(eight["bound"], 1.0);

    let seven = json(&run(dir.path(), &["bell", "--n", "7", "--settings", "xy"]));
    assert!((f(&seven["value"]) - 1.0).abs() < 1e-10);
    assert_eq!(seven["violation"], false);
}

#[test]
fn bell_optimize_writes_settings() {
    let dir = tempfile::tempdir().unwrap();
    let report = json(&run(
        dir.path(),
        &["bell", "--n", "8", "--settings", "optimize", "--restarts", "16", "--settings-out", "best.json"],
    ));
    assert!(f(&report["value"]) >= 2f64.powf(3.5) / 9.0 - 1e-6);
    assert_eq!(report["violation"], true);

    // the emitted settings reproduce the value
    let again = json(&run(dir.path(), &["bell", "--n", "8", "--settings", "best.json"]));
    assert!((f(&again["value"]) - f(&report["value"])).abs() < 1e-12);
}

#[test]
fn bell_bad_settings_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("s.json"), r#"{"a":[[1,0,0]],"a_prime":[[0,1,0]]}"#).unwrap();
    assert_eq!(run(dir.path(), &["bell", "--n", "3", "--settings", "s.json"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["bell", "--n", "3", "--settings", "nope.json"]).status.code(), Some(2));
}

#[test]
fn extract_ghz_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let report = json(&run(dir.path(), &["extract", "--ghz", "5"]));
    let summary = &report["summary"];
    assert!((f(&summary["probability"]) - 1.0).abs() < 1e-10);
    assert_eq!(summary["pair"], serde_json::json!([1, 2]));
}

#[test]
fn extract_random_qubits() {
    let dir = tempfile::tempdir().unwrap();
    let report = json(&run(dir.path(), &["extract", "--random", "2,2,2", "--seed", "7"]));
    for c in report["summary"]["schmidt_coeffs"].as_array().unwrap() {
        assert!((f(c) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-8);
    }
    assert!(f(&report["summary"]["probability"]) > 0.0);
    assert!(!report["steps"].as_array().unwrap().is_empty());
}

#[test]
fn extract_error_codes() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("prod.json"), r#"{"dims":[2,2,3],"amps":[[0,1.0,0.0]]}"#).unwrap();
    let out = run(dir.path(), &["extract", "--input", "prod.json"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stderr.is_empty());
    assert_eq!(run(dir.path(), &["extract", "--ghz", "3", "--pair", "1,4"]).status.code(), Some(4));
    assert_eq!(run(dir.path(), &["extract"]).status.code(), Some(2));
}

#[test]
fn extract_out_prints_summary() {
    let dir = tempfile::tempdir().unwrap();
    let summary = json(&run(dir.path(), &["extract", "--ghz", "4", "--out", "trace.json"]));
    assert_eq!(summary["trace_file"], "trace.json");
    let trace: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("trace.json")).unwrap()).unwrap();
    assert_eq!(trace["summary"]["pair"], summary["pair"]);
    assert_eq!(trace["config"]["N"], 4);
}

#[test]
fn sweep_table() {
    let dir = tempfile::tempdir().unwrap();
    let report = json(&run(dir.path(), &["sweep", "--n-min", "2", "--n-max", "9"]));
    for row in report["rows"].as_array().unwrap() {
        let n = row["N"].as_u64().unwrap();
        assert!((f(&row["value"]) - f(&row["predicted"])).abs() < 1e-10);
        assert_eq!(row["violation"], n >= 8);
    }
    assert_eq!(run(dir.path(), &["sweep", "--n-min", "1"]).status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["scan", "--n", "5"][..],
        &["bell", "--n", "6", "--settings", "optimize", "--restarts", "4", "--seed", "3"],
        &["extract", "--random", "2,3,2", "--seed", "11"],
        &["sweep", "--n-max", "6", "--format", "csv"],
    ] {
        let a = run(dir.path(), args);
        let b = run(dir.path(), args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
