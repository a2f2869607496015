use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn system(name: &str) -> String {
    root().join("systems").join(name).display().to_string()
}

fn kova(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kova"))
        .args(args)
        .env("KOVA_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn validate(report: &Value) {
    let text = fs::read_to_string(root().join("schema/report.schema.json")).unwrap();
    let schema: Value = serde_json::from_str(&text).unwrap();
    let v = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = v.iter_errors(report).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "schema violations: {errors:?}");
}

#[test]
fn analyze_lotka_vector_field() {
    let out = kova(&["analyze", &system("lotka.kova"), "--type", "1", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    validate(&r);
    let scan = &r["scans"][0];
    let b = scan["balance"].as_u64().unwrap() as usize - 1;
    assert_eq!(r["balances"][b]["c"], serde_json::json!(["0", "-1", "0"]));
    assert_eq!(scan["spectrum"], serde_json::json!(["-1", "-1", "-2"]));
    let dims: Vec<(i64, u64)> = scan["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| {
            (
                d["degree"].as_i64().unwrap(),
                d["basis"]["dimension"].as_u64().unwrap(),
            )
        })
        .collect();
    assert_eq!(dims, vec![(-1, 0), (0, 0), (1, 1), (2, 0)]);
}

#[test]
fn resonances_of_linear_float_system_are_empty() {
    let out = kova(&[
        "resonances",
        &system("artificial.kova"),
        "--type",
        "0",
        "0",
        "--k-max",
        "6",
        "--float",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    validate(&r);
    let res = &r["resonances"][0];
    assert_eq!(res["kind"], "fixed_point");
    for g in res["groups"].as_array().unwrap() {
        let k = g["degree"].as_i64().unwrap();
        let n = g["certificates"].as_array().unwrap().len();
        if k >= 1 {
            assert_eq!(n, 0, "order {k}");
        }
    }
    assert!(!res["window"]["description"].as_str().unwrap().is_empty());
}

#[test]
fn verify_oregonator_cut_invariant() {
    let out = kova(&[
        "verify",
        &system("oregonator.kova"),
        "--tensor",
        &system("oreg_T.kova"),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = json(&out);
    validate(&r);
    let o = &r["verify"]["oracle"];
    assert!(o["invariance_residual"].as_f64().unwrap() < 1e-6);
    assert_eq!(r["verify"]["symbolic_invariant"], true);
}

#[test]
fn verify_rejects_non_invariant_with_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.kova");
    fs::write(&t, "T = x d/dx\n").unwrap();
    let out = kova(&[
        "verify",
        &system("oregonator.kova"),
        "--tensor",
        t.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    validate(&json(&out));
}

#[test]
fn exit_codes() {
    assert_eq!(kova(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(kova(&["analyze"]).status.code(), Some(1));
    assert_eq!(
        kova(&["analyze", "/nonexistent.kova"]).status.code(),
        Some(1)
    );
    assert_eq!(kova(&["--help"]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.kova");
    fs::write(&bad, "x' = x/y\ny' = 1\n").unwrap();
    let out = kova(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(
        msg.contains("1:7") && msg.contains("non-polynomial"),
        "{msg}"
    );

    // slices of degree 1 and 3 straddle m = 2
    let mixed = dir.path().join("mixed.kova");
    fs::write(&mixed, "weights = [1]\ndegree = 2\nx' = x + x^2 + x^3\n").unwrap();
    assert_eq!(
        kova(&["analyze", mixed.to_str().unwrap()]).status.code(),
        Some(3)
    );
}

#[test]
fn seeded_reports_are_byte_identical() {
    let args = [
        "analyze",
        &system("oregonator_full.kova"),
        "--type",
        "1",
        "0",
        "--seed",
        "7",
    ];
    let a = kova(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_kova"))
        .args(args)
        .env("KOVA_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let code = kova_cli::run([
        "kova",
        "balances",
        &system("lotka.kova"),
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let r: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    validate(&r);
    assert_eq!(r["command"], "balances");
    assert!(r["balances"]
        .as_array()
        .unwrap()
        .iter()
        .any(|b| b["c"] == serde_json::json!(["0", "-1", "0"])));
}

#[test]
fn every_subcommand_validates() {
    for cmd in [
        "analyze",
        "balances",
        "kovalevskaya",
        "resonances",
        "search",
    ] {
        let out = kova(&[
            cmd,
            &system("lotka.kova"),
            "--type",
            "1",
            "1",
            "--type",
            "0",
            "2",
        ]);
        assert_eq!(out.status.code(), Some(0), "{cmd}");
        validate(&json(&out));
    }
}
