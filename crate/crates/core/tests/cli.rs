mod common;

use std::fs;

use cascade_mnl::cli::run;

fn cmnl(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("cmnl").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn golden_files() {
    let update = std::env::var_os("CMNL_UPDATE_GOLDEN").is_some();
    if let Err(e) = common::golden::check_all(update) {
        panic!("{e}\n(set CMNL_UPDATE_GOLDEN=1 to regenerate)");
    }
}

#[test]
fn eval_reports_pair_revenue() {
    let (code, out, _) = cmnl(&["--format", "json", "eval", "tests/data/pair.json", "tests/data/pair_assortment.json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["results"]["f_value"], 0.75);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "eval");
}

#[test]
fn capacity_violation_names_stage() {
    let (code, out, _) = cmnl(&["validate", "tests/data/pair.json", "tests/data/pair_over_capacity.json"]);
    assert_eq!(code, 2);
    assert!(out.contains("capacity: stage 1"), "{out}");
}

#[test]
fn emitted_assortments_validate() {
    let dir = tempfile::tempdir().unwrap();
    for method in ["acme", "dp", "single-stage", "exact", "exact-p1"] {
        let path = dir.path().join(format!("{method}.json"));
        let p = path.to_str().unwrap();
        let (code, _, err) =
            cmnl(&["solve", "tests/data/table.json", "--method", method, "--epsilon", "0.5", "--assortment-out", p]);
        assert_eq!(code, 0, "{err}");
        let (code, out, _) = cmnl(&["validate", "tests/data/table.json", p]);
        assert_eq!(code, 0, "{out}");
    }
}

#[test]
fn acme_against_exact() {
    let read = |args: &[&str]| -> serde_json::Value {
        let (code, out, err) = cmnl(args);
        assert_eq!(code, 0, "{err}");
        serde_json::from_str(&out).unwrap()
    };
    let exact = read(&["--format", "json", "solve", "tests/data/table.json", "--method", "exact"]);
    let acme = read(&["--format", "json", "solve", "tests/data/table.json", "--method", "acme"]);
    let ratio = acme["results"]["f_value"].as_f64().unwrap() / exact["results"]["f_value"].as_f64().unwrap();
    assert!(ratio >= acme["results"]["certified_ratio"].as_f64().unwrap());
}

#[test]
fn exit_statuses() {
    assert_eq!(cmnl(&["solve", "tests/data/pair.json", "--method", "bogus"]).0, 1);
    assert_eq!(cmnl(&["solve", "tests/data/pair.json", "--rho", "1.5"]).0, 1);
    assert_eq!(cmnl(&["eval", "tests/data/pair.json", "tests/data/missing.json"]).0, 1);
    assert_eq!(cmnl(&["simulate", "tests/data/pair.json", "tests/data/pair_assortment.json", "--trials", "10"]).0, 1);
    let (code, _, err) = cmnl(&["eval", "tests/data/pair.json", "tests/data/pair_over_capacity.json"]);
    assert_eq!(code, 2);
    assert!(err.contains("capacity"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"m": 1, "d": 1, "w": 1, "products": [], "patience": {"kind": "exponential", "rate": 1}, "extra": 1}"#).unwrap();
    let (code, _, err) = cmnl(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code, 1, "{err}");

    let burnout = dir.path().join("burnout.json");
    fs::write(&burnout, r#"{"m": 1, "d": 1, "w": 2, "products": [{"revenue": 1, "cost": 1, "weights": [1, 2]}], "patience": {"kind": "exponential", "rate": 1}}"#).unwrap();
    let (code, _, err) = cmnl(&["validate", burnout.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("Assumption 2"));

    let big = dir.path().join("big.json");
    let (code, _, _) = cmnl(&["gen", "--seed", "1", "--n", "30", "--m", "4", "--d", "4", "--w", "3", "-o", big.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(cmnl(&["solve", big.to_str().unwrap(), "--method", "exact"]).0, 3);
    assert_eq!(cmnl(&["solve", big.to_str().unwrap(), "--method", "dp"]).0, 3);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let (code, stdout, _) = cmnl(&[
        "--format", "json", "--out", out.to_str().unwrap(), "eval", "tests/data/pair.json", "tests/data/pair_assortment.json",
    ]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["results"]["g_value"], 1.0);
}
