//! The `phidef` binary as a subprocess: envelope shape, CSV layout, exit codes.

use std::process::{Command, Output};

use serde_json::Value;

fn phidef(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phidef"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn json_envelope_has_the_fixed_top_level_keys() {
    let o = phidef(&["spectrum", "tsallis:q=1.5", "--n_max", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    for k in [
        "tool_version",
        "command",
        "scheme",
        "params",
        "results",
        "diagnostics",
    ] {
        assert!(keys.contains(&k), "missing {k} in {keys:?}");
    }
    assert_eq!(v["scheme"], "tsallis:q=1.5");
    assert_eq!(v["results"]["band_top"], 2.0);
    assert_eq!(v["results"]["levels"][0], 0.5);
}

#[test]
fn spectrum_csv_has_one_row_per_level() {
    let o = phidef(&["spectrum", "tsallis:q=2", "--n_max", "3", "--format", "csv"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,E_n,gap_n");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("0,5.0000000000000000e-1,5.0000000000000000e-1"));
    assert!(lines[2].starts_with("1,1.0000000000000000e0,0.0000000000000000e0"));
}

#[test]
fn unbounded_band_is_reported_as_inf() {
    let o = phidef(&["spectrum", "boson", "--n_max", "2"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["results"]["band_top"], "inf");
}

#[test]
fn invalid_scheme_is_a_usage_error_on_stderr() {
    let o = phidef(&["numbers", "tsallis:q=2.5", "--n_max", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    let err = String::from_utf8(o.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    let v: Value = serde_json::from_str(&err).unwrap();
    assert!(v["error"].is_string() && v["detail"].is_string());
}

#[test]
fn unknown_key_and_missing_command_exit_two() {
    assert_eq!(
        phidef(&["numbers", "boson", "--bogus", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(phidef(&[]).status.code(), Some(2));
}

#[test]
fn coherent_outside_the_disk_is_rejected() {
    let o = phidef(&["coherent", "tsallis:q=2", "--alpha", "1.0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn coherent_reports_normalization_and_residual() {
    let o = phidef(&["coherent", "tsallis:q=2", "--alpha", "0.6", "--k", "3"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let r = &v["results"];
    assert!((r["norm_const"].as_f64().unwrap() - 0.8).abs() < 1e-14);
    assert_eq!(r["coefficients"].as_array().unwrap().len(), 3);
    assert!(r["eigen_residual"].as_f64().unwrap() < 1e-12);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = [
        "exp",
        "tsallis:q=1.3",
        "--x_min",
        "-2",
        "--x_max",
        "2",
        "--points",
        "9",
        "--format",
        "csv",
    ];
    assert_eq!(phidef(&args).stdout, phidef(&args).stdout);
}

#[test]
fn verify_suite_table_and_mutation() {
    let o = phidef(&[
        "verify",
        "spectrum",
        "--scheme",
        "tsallis:q=1.5",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("spectrum,E1 = 1/2 + 1/q,"));
    let o = phidef(&["verify", "series", "--mutate_phi", "5:44"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["results"]["overall"], false);
}
