use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_np-spectra"));
    c.env_remove("NP_SPECTRA_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn shape(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn ellipse_spectrum_has_plus_minus_three() {
    let dir = tempfile::tempdir().unwrap();
    let p = shape(dir.path(), "e.json", r#"{"kind": "ellipse", "a": 2.0, "b": 1.0}"#);
    let v = json(&run(&["spectrum", "--shape", p.to_str().unwrap(), "--n", "256"]));
    assert_eq!(v["schema_version"], 1);
    assert!(v["generated_unix"].is_u64());
    let l: Vec<f64> = v["modes"].as_array().unwrap().iter().map(|m| f(&m["lambda"])).collect();
    assert!((l[0].abs() - 3.0).abs() < 1e-6 && (l[1].abs() - 3.0).abs() < 1e-6);
    assert!(l[0] * l[1] < 0.0);
    assert!((f(&v["robin"]["lambda"]) - 1.0).abs() < 1e-8);
}

#[test]
fn circle_warns_about_missing_modes() {
    let dir = tempfile::tempdir().unwrap();
    let p = shape(dir.path(), "c.json", r#"{"kind": "circle", "r": 1.0}"#);
    let out = run(&["spectrum", "--shape", p.to_str().unwrap(), "--n", "64"]);
    let v = json(&out);
    assert!(v["modes"].as_array().unwrap().is_empty());
    assert!(!v["warnings"].as_array().unwrap().is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn input_errors_exit_with_two() {
    let out = run(&["spectrum", "--shape", "/nonexistent/shape.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read"));

    let dir = tempfile::tempdir().unwrap();
    let p = shape(dir.path(), "t.json", r#"{"kind": "triangle"}"#);
    assert_eq!(run(&["spectrum", "--shape", p.to_str().unwrap()]).status.code(), Some(2));

    let out = bin().env("NP_SPECTRA_THREADS", "zero").args(["xi", "--orders", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sphere_spectrum_csv() {
    let dir = tempfile::tempdir().unwrap();
    let p = shape(dir.path(), "s.json", r#"{"kind": "sphere", "r": 1.0}"#);
    let out = run(&["spectrum", "--shape", p.to_str().unwrap(), "--refinement", "1", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("# schema_version=")));
}

#[test]
fn drude_resonances_of_ellipse_twins() {
    let v = json(&run(&["resonance", "--lambda", "3,-3", "--grid", "50"]));
    let modes = v["modes"].as_array().unwrap();
    assert!((f(&modes[0]["omega_k_over_omega_p"]) - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    assert!((f(&modes[1]["omega_k_over_omega_p"]) - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
}

#[test]
fn lossy_gain_peaks_near_resonance() {
    let v = json(&run(&["resonance", "--lambda", "3", "--gamma", "0.02", "--grid", "400"]));
    let m = &v["modes"][0];
    let wk = f(&m["omega_k"]);
    let peak = f(&m["peak_omega"]);
    assert!((peak - wk).abs() < 0.01, "{peak} {wk}");
    assert!(m["gain_curve"].as_array().unwrap().iter().all(|p| f(&p[1]).is_finite()));
}

#[test]
fn unattainable_mode_is_flagged_not_fatal() {
    // eps_k = -2 lies outside the silver branch reachable from eps_inf.
    let v = json(&run(&["resonance", "--lambda", "3,1.05", "--silver", "--grid", "20"]));
    assert_eq!(v["modes"].as_array().unwrap().len(), 2);
}

#[test]
fn fredholm_reports_traces_and_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let p = shape(dir.path(), "e.json", r#"{"kind": "ellipse", "a": 2.0, "b": 1.0}"#);
    let csv = dir.path().join("f.csv");
    let v = json(&run(&[
        "fredholm", "--shape", p.to_str().unwrap(), "--n", "128", "--orders", "20", "--csv", csv.to_str().unwrap(),
    ]));
    assert!((f(&v["q"][0]) - 0.25).abs() < 1e-12);
    for key in ["series_vs_product", "series_vs_direct", "product_vs_direct"] {
        assert!(f(&v["residuals"][key]) < 1e-8, "{key}");
    }
    assert!(v["warnings"][0].as_str().unwrap().contains("trusted order"));
    let text = fs::read_to_string(csv).unwrap();
    assert!(text.contains("n,q_2n,b_2n"));
}

#[test]
fn underresolved_determinant_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let p = shape(dir.path(), "k.json", r#"{"kind": "kite"}"#);
    let out = run(&["fredholm", "--shape", p.to_str().unwrap(), "--n", "64"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
}

#[test]
fn xi_coefficients_and_zeros() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("c.csv");
    let zeros = dir.path().join("z.csv");
    let v = json(&run(&[
        "xi", "--digits", "50", "--orders", "20", "--zeros-to", "30", "--csv", csv.to_str().unwrap(), "--zeros-out",
        zeros.to_str().unwrap(),
    ]));
    assert_eq!(v["c"].as_array().unwrap().len(), 21);
    assert!(v["c"][0].as_str().unwrap().starts_with("4.97120778188314"));
    assert_eq!(v["c_positive"], true);
    assert_eq!(v["q_positive"], true);
    let z: Vec<f64> = v["zeros"].as_array().unwrap().iter().map(|s| s.as_str().unwrap().parse().unwrap()).collect();
    for (a, b) in z.iter().zip([14.1347251417, 21.0220396388, 25.0108575801]) {
        assert!((a - b).abs() < 1e-9);
    }
    let rows = |p: &Path| fs::read_to_string(p).unwrap().lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(rows(&zeros), 1 + 3);
    assert_eq!(rows(&csv), 1 + 21);
}

#[test]
fn xi_grommer_positive() {
    let v = json(&run(&["xi", "--grommer", "4", "--orders", "4"]));
    let g = v["grommer"].as_array().unwrap();
    assert_eq!(g.len(), 5);
    assert!(g.iter().all(|r| r["positive"] == true));
    let last: f64 = g[4]["min_eigenvalue"].as_str().unwrap().parse().unwrap();
    assert!(last > 0.0);
}

#[test]
fn low_precision_grommer_is_refused() {
    let out = run(&["xi", "--digits", "10", "--grommer", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("precision below feasibility threshold"));
}

#[test]
fn grommer_check_detects_off_axis_zero() {
    let v = json(&run(&["grommer-check", "--synthetic", "2,1", "--max-n", "3"]));
    assert_eq!(v["all_positive"], false);
    let v = json(&run(&["grommer-check", "--max-n", "3"]));
    assert_eq!(v["all_positive"], true);
}

#[test]
fn output_is_byte_identical_without_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let p = shape(dir.path(), "k.json", r#"{"kind": "kite"}"#);
    let args = ["--no-timestamp", "fredholm", "--shape", p.to_str().unwrap(), "--n", "256", "--orders", "6"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(!String::from_utf8_lossy(&a.stdout).contains("generated_unix"));
    let x = run(&["--no-timestamp", "xi", "--orders", "5"]);
    let y = run(&["--no-timestamp", "xi", "--orders", "5"]);
    assert_eq!(x.stdout, y.stdout);
}

#[test]
fn excite_reports_dipole_coupling() {
    let dir = tempfile::tempdir().unwrap();
    let p = shape(dir.path(), "e.json", r#"{"kind": "ellipse", "a": 2.0, "b": 1.0}"#);
    let out_path = dir.path().join("x.json");
    let out = run(&[
        "excite", "--shape", p.to_str().unwrap(), "--n", "128", "--omega0", "0.5", "--modes", "2", "--gamma", "0.05",
        "-o", out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&fs::read_to_string(out_path).unwrap()).unwrap();
    assert_eq!(v["command"], "excite");
    assert_eq!(v["modes"].as_array().unwrap().len(), 2);
}
