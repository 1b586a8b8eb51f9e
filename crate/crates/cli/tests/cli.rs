use std::path::Path;
use std::process::{Command, Output};

use num_complex::Complex64;
use period_atlas::oracles::gauss_2f1_agm;
use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_period-atlas"))
}

fn run(args: &[&str]) -> (i32, Value) {
    let out = bin().args(args).output().expect("spawn");
    (out.status.code().unwrap_or(-1), parse(&out))
}

fn parse(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or(Value::Null)
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p.to_str().unwrap().to_string()
}

fn legendre_matrix(scale: f64, lambda: f64) -> Value {
    json!({ "n": 2, "entries": [[scale, 0], [0, 0], [scale, 0], [scale, 0], [0, 0], [1, 0], [1, 0], [lambda, 0]] })
}

fn complex(v: &Value) -> Complex64 {
    Complex64::new(v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

#[test]
fn pc_check_rejects_the_sum() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "sum.json", &json!([[[1, 1], "1", "1"], [[0, 1], "1", "1"], [[1, 0], "-1", "1"]]));
    let (code, v) = run(&["pc-check", "--minpoly", &f]);
    assert_eq!(code, 0);
    assert_eq!(v["positively_closed"], json!(false));
    assert_eq!(v["certificate"], json!("x+1"));
}

#[test]
fn pc_check_accepts_the_quadratic() {
    let dir = tempfile::tempdir().unwrap();
    let m = json!({ "minimal_polynomial": [[[1, 2], "1", "1"], [[0, 2], "1", "1"], [[1, 1], "-1", "1"], [[0, 0], "1", "1"]], "root_index": 1 });
    let (code, v) = run(&["pc-check", "--minpoly", &write(dir.path(), "q.json", &m)]);
    assert_eq!(code, 0);
    assert_eq!(v["positively_closed"], json!(true));
    assert!(v["certificate"].is_null());
}

#[test]
fn cubic_period_contains_the_series() {
    let dir = tempfile::tempdir().unwrap();
    let c = json!({ "coefficients": [[1, 0], [0, 0], [-1.2, 0], [0, 0], [0, 0], [0.2, 0], [0, 0], [-1, 0], [0, 0], [0, 0]] });
    let (code, v) = run(&["period", "cubic", "--coeffs", &write(dir.path(), "legendre_0.2.json", &c), "--json"]);
    assert_eq!(code, 0);
    let target = gauss_2f1_agm(Complex64::new(0.2, 0.0)).unwrap();
    let branches = v["branches"].as_array().unwrap();
    assert!(branches.iter().any(|b| (complex(&b["value"]) - target).norm() < 1e-12 * target.norm()));
}

#[test]
fn double_cover_and_torus_invariance() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", &legendre_matrix(1.0, 0.3));
    let b = write(dir.path(), "b.json", &legendre_matrix(2.0, 0.3));
    let (_, ia) = run(&["invariants", "--matrix", &a, "--cross-ratios"]);
    let (_, ib) = run(&["invariants", "--matrix", &b, "--cross-ratios"]);
    let (fa, fb) = (complex(&ia["cross_ratios"][0][0]), complex(&ib["cross_ratios"][0][0]));
    assert!((fa - 0.3).norm() < 1e-15 && (fb - 0.3).norm() < 1e-15);

    let (code, v) = run(&["period", "double-cover", "--matrix", &a]);
    assert_eq!(code, 0);
    let target = gauss_2f1_agm(Complex64::new(0.3, 0.0)).unwrap();
    assert!((complex(&v["value"]).norm() - target.norm()).abs() < 1e-12);
    assert_eq!(v["branch_log"]["prefactor_sqrt"], json!(0));
}

#[test]
fn domain_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = json!({ "n": 2, "entries": [[1, 0], [0, 0], [2, 0], [1, 0], [0, 0], [1, 0], [0, 0], [0.2, 0]] });
    let (code, v) = run(&["period", "double-cover", "--matrix", &write(dir.path(), "bad.json", &bad)]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], json!("non_generic"));

    let far = write(dir.path(), "far.json", &legendre_matrix(1.0, 0.9));
    let (code, v) = run(&["period", "double-cover", "--matrix", &far]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], json!("outside_domain"));
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(run(&["verify", "--frobnicate"]).0, 64);
    assert_eq!(run(&["teleport"]).0, 64);
    assert_eq!(run(&["verify", "--suite", "nope"]).0, 64);
}

#[test]
fn verify_is_deterministic() {
    let a = bin().args(["verify", "--suite", "legendre", "--seed", "7", "--json"]).output().unwrap();
    let b = bin().args(["verify", "--suite", "legendre", "--seed", "7", "--json"]).output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(parse(&a)["passed"], json!(true));
}

#[test]
fn aronhold_cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let derive = |extra: &[&str]| {
        let out = bin().env("PERIOD_ATLAS_CACHE", &cache).args(["aronhold", "derive"]).args(extra).output().unwrap();
        assert_eq!(out.status.code(), Some(0));
        parse(&out)
    };
    assert_eq!(derive(&[])["derived"], json!(true));
    let again = derive(&[]);
    assert_eq!(again["derived"], json!(false));
    assert_eq!((again["s_terms"].as_u64(), again["t_terms"].as_u64()), (Some(25), Some(103)));
    assert_eq!(derive(&["--force"])["derived"], json!(true));

    let other = dir.path().join("other");
    let v = derive(&["--out", other.to_str().unwrap()]);
    assert_eq!(v["derived"], json!(true));
    assert!(other.join("aronhold_S.json").exists());
}
