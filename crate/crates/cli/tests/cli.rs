use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_slice-calc"));
    c.env("SLICE_CALC_THREADS", "2");
    c
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("slice-calc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn quat_diag(name: &str, d: &[[f64; 4]]) -> PathBuf {
    let m = d.len();
    let rows: Vec<Vec<[f64; 4]>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| if i == j { d[i] } else { [0.0; 4] })
                .collect()
        })
        .collect();
    let v = serde_json::json!({"kind": "quaternion-matrix", "m": m, "entries": rows});
    scratch(name, &v.to_string())
}

fn entry(v: &Value, i: usize, j: usize) -> Vec<f64> {
    v["entries"][i][j]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect()
}

#[test]
fn spectrum_of_real_diagonal() {
    let f = quat_diag("d23.json", &[[2.0, 0.0, 0.0, 0.0], [3.0, 0.0, 0.0, 0.0]]);
    let out = run(&["spectrum", f.to_str().unwrap()]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    let spheres = v["spheres"].as_array().unwrap();
    assert_eq!(spheres.len(), 2);
    assert_eq!(spheres[0]["u"].as_f64(), Some(2.0));
    assert_eq!(spheres[1]["u"].as_f64(), Some(3.0));
    assert_eq!(v["omega"].as_f64(), Some(0.0));
}

#[test]
fn imaginary_units_share_one_sphere() {
    let f = quat_diag("de.json", &[[0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]]);
    let v = json(&run(&["spectrum", f.to_str().unwrap()]));
    let spheres = v["spheres"].as_array().unwrap();
    assert_eq!(spheres.len(), 1);
    assert_eq!(spheres[0]["multiplicity"], 2);
    assert!((spheres[0]["v"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn parse_error_reports_position() {
    let f = scratch(
        "bad.json",
        "{\n \"kind\": \"quaternion-matrix\",\n \"m\": 1,\n \"entries\": [[[1,2,3]]]\n}\n",
    );
    let out = run(&["spectrum", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4"), "{err}");
    assert!(err.contains("column"), "{err}");
}

#[test]
fn missing_file_is_input_error() {
    let out = run(&["spectrum", "/nonexistent/slice-calc/op.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn hinf_square_root() {
    let f = quat_diag("d49.json", &[[4.0, 0.0, 0.0, 0.0], [9.0, 0.0, 0.0, 0.0]]);
    let out = run(&[
        "apply",
        f.to_str().unwrap(),
        "--func",
        "frac_pow(0.5)",
        "--method",
        "hinf",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    let r = &v["result"];
    assert!((entry(r, 0, 0)[0] - 2.0).abs() < 1e-8);
    assert!((entry(r, 1, 1)[0] - 3.0).abs() < 1e-8);
    assert!(entry(r, 0, 1).iter().all(|x| x.abs() < 1e-8));
}

#[test]
fn all_methods_agree_on_psi() {
    let f = quat_diag("d23b.json", &[[2.0, 0.0, 0.0, 0.0], [3.0, 0.0, 0.0, 0.0]]);
    let out = run(&[
        "apply",
        f.to_str().unwrap(),
        "--func",
        "psi(1)",
        "--method",
        "all",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert!(v["max_deviation"].as_f64().unwrap() <= 1e-6);
    for m in v["methods"].as_array().unwrap() {
        assert_eq!(m["status"], "ok", "{m}");
    }
}

#[test]
fn pole_on_spectrum_exits_with_calculus_code() {
    let f = quat_diag("de2.json", &[[0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]]);
    let out = run(&[
        "apply",
        f.to_str().unwrap(),
        "--func",
        "rational([0,1],[1,0,1])",
        "--method",
        "rational",
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("PoleOnSpectrum"));
}

#[test]
fn malformed_function_is_input_error() {
    let f = quat_diag("d1.json", &[[1.0, 0.0, 0.0, 0.0]]);
    let out = run(&["apply", f.to_str().unwrap(), "--func", "nosuch(1)"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn resolvent_suite_passes() {
    let out = run(&["verify", "resolvent-eq", "--seed", "7", "--trials", "100"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["suites"][0]["trials"], 100);
    assert!(v["suites"][0]["witnesses"].as_array().unwrap().is_empty());
}

#[test]
fn zero_trials_rejected() {
    let out = run(&["verify", "resolvent-eq", "--trials", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_is_deterministic() {
    let args = ["verify", "star-inverse", "--seed", "3", "--trials", "8"];
    let a = run(&args);
    let b = bin()
        .args(args)
        .env("SLICE_CALC_THREADS", "1")
        .output()
        .unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn quadratic_scalar_closed_forms() {
    let one = quat_diag("q1.json", &[[1.0, 0.0, 0.0, 0.0]]);
    let v = json(&run(&[
        "quadratic",
        one.to_str().unwrap(),
        "--psi",
        "1",
        "--trials",
        "2",
    ]));
    assert!((v["closed_form"].as_f64().unwrap() - 0.5).abs() < 1e-5);
    for x in v["integrals"].as_array().unwrap() {
        assert!((x.as_f64().unwrap() - 0.5).abs() < 1e-5);
    }

    let ten = quat_diag("q10.json", &[[10.0, 0.0, 0.0, 0.0]]);
    let v = json(&run(&[
        "quadratic",
        ten.to_str().unwrap(),
        "--psi",
        "2",
        "--trials",
        "2",
    ]));
    assert!((v["closed_form"].as_f64().unwrap() - 1.0 / 12.0).abs() < 1e-5);
}

#[test]
fn quadratic_bound_on_hermitian() {
    let v = serde_json::json!({
        "kind": "quaternion-matrix",
        "m": 2,
        "entries": [[[2.0, 0.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0]], [[1.0, 0.0, 0.0, 0.0], [3.0, 0.0, 0.0, 0.0]]]
    });
    let f = scratch("herm.json", &v.to_string());
    let out = run(&[
        "quadratic",
        f.to_str().unwrap(),
        "--func",
        "exp_neg",
        "--trials",
        "2",
        "--adjoint",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["hinf_bound"]["holds"], true);
    assert!(v["hinf_bound"]["ratio"].as_f64().unwrap() <= 1.0);
}

#[test]
fn dirac_file_round_trips() {
    let out = run(&["dirac", "--n", "1", "--grid", "4"]);
    assert!(out.status.success());
    let f = scratch("dirac.json", &String::from_utf8(out.stdout).unwrap());
    let v = json(&run(&["spectrum", f.to_str().unwrap()]));
    assert_eq!(v["operator"]["kind"], "paravector");
    let total: u64 = v["spheres"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["multiplicity"].as_u64().unwrap())
        .sum();
    assert_eq!(total, 4);
}

#[test]
fn apply_writes_output_file() {
    let f = quat_diag("d49b.json", &[[4.0, 0.0, 0.0, 0.0], [9.0, 0.0, 0.0, 0.0]]);
    let dest = std::env::temp_dir()
        .join(format!("slice-calc-cli-{}", std::process::id()))
        .join("psi.json");
    let out = run(&[
        "apply",
        f.to_str().unwrap(),
        "--func",
        "psi(1)",
        "--method",
        "sector",
        "--out",
        dest.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&dest).unwrap()).unwrap();
    assert_eq!(v["method"], "sector");
    let r = &v["result"];
    assert!((entry(r, 0, 0)[0] - 4.0 / 17.0).abs() < 1e-8);
    assert!((entry(r, 1, 1)[0] - 9.0 / 82.0).abs() < 1e-8);
}

#[test]
fn growing_function_rejected_by_sector() {
    let f = quat_diag("d49c.json", &[[4.0, 0.0, 0.0, 0.0], [9.0, 0.0, 0.0, 0.0]]);
    let out = run(&[
        "apply",
        f.to_str().unwrap(),
        "--func",
        "frac_pow(0.5)",
        "--method",
        "sector",
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NotInPsiClass"));
}
