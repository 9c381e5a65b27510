use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        Self {
            dir: TempDir::new().unwrap(),
        }
    }

    fn file(&self, name: &str, contents: &str) -> PathBuf {
        let path = self.dir.path().join(name);
        std::fs::write(&path, contents).unwrap();
        path
    }

    fn path(&self) -> &Path {
        self.dir.path()
    }
}

fn majorate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_majorate"))
        .args(args)
        .env_remove("MAJORATE_BUDGET")
        .output()
        .unwrap()
}

fn run(args: &[&Path], flags: &[&str]) -> Output {
    let mut all: Vec<&str> = Vec::new();
    let (cmd, paths) = (flags[0], &flags[1..]);
    all.push(cmd);
    all.extend(args.iter().map(|p| p.to_str().unwrap()));
    all.extend(paths);
    majorate(&all)
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout));
    })
}

fn csv_rows(out: &Output) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn rate_of_uniform_pair() {
    let ws = Workspace::new();
    let p = ws.file("u4.json", "[0.25, 0.25, 0.25, 0.25]");
    let q = ws.file("u2.json", r#"{"name": "coin", "weights": [0.5, 0.5]}"#);
    let out = run(&[&p, &q], &["rate"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["rate"].as_f64(), Some(2.0));
    assert_eq!(v["argmin_alphas"], "all");
    assert_eq!(v["status"], "exact_special_case");
    let samples = v["samples"].as_array().unwrap();
    assert_eq!(samples.last().unwrap()["alpha"], "+inf");
}

#[test]
fn rate_with_endpoint_minimum() {
    let ws = Workspace::new();
    let p = ws.file("p.csv", "weight\n0.9\n0.1\n");
    let q = ws.file("q.json", "[0.5, 0.5]");
    let out = run(&[&p, &q], &["rate", "--grid", "513"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!((v["rate"].as_f64().unwrap() + 0.9f64.log2()).abs() < 1e-12);
    assert_eq!(v["argmin_alphas"], serde_json::json!(["+inf"]));
    assert_eq!(v["status"], "grid_refined");

    let csv = run(&[&p, &q], &["rate", "--grid", "9", "--format", "csv"]);
    let (header, rows) = csv_rows(&csv);
    assert_eq!(header, ["alpha", "ratio"]);
    assert_eq!(rows.len(), 9);
    assert_eq!(rows[0][0], "0");
    assert_eq!(rows[4][0], "1");
}

#[test]
fn majorize_exit_codes() {
    let ws = Workspace::new();
    let p = ws.file("p.json", "[0.9, 0.1]");
    let q = ws.file("q.json", "[0.8, 0.2]");
    let out = run(&[&p, &q], &["majorize", "-n", "1", "-m", "1"]);
    assert_eq!(code(&out), 3);
    let v = json(&out);
    assert_eq!(v["holds"], false);
    assert_eq!(v["witness_N"], "1");

    let out = run(&[&q, &p], &["majorize"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["holds"], true);
    assert!(v["witness_N"].is_null());

    let u4 = ws.file("u4.json", "[0.25, 0.25, 0.25, 0.25]");
    let u2 = ws.file("u2.json", "[0.5, 0.5]");
    let out = run(&[&u4, &u2], &["majorize", "-n", "3", "-m", "6"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn exact_majorize_agrees() {
    let ws = Workspace::new();
    let p = ws.file("p.json", r#"["1/3", "1/3", "1/3"]"#);
    let q = ws.file("q.json", r#"["1/2", "1/4", "1/4"]"#);
    for (a, b, expected) in [(&p, &p, 0), (&p, &q, 0), (&q, &p, 3)] {
        let out = run(&[a, b], &["majorize", "-n", "2", "-m", "2", "--exact"]);
        assert_eq!(code(&out), expected);
    }
}

#[test]
fn verify_reports_finite_n_row() {
    let ws = Workspace::new();
    let p = ws.file("p.json", r#"["1/2", "1/4", "1/4"]"#);
    let out = run(&[&p], &["verify", "-n", "4"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let rows = v["rows"].as_array().unwrap();
    let row = rows.iter().find(|r| r["V"].as_f64() == Some(-1.5)).unwrap();
    assert_eq!(row["S"].as_f64(), Some(1.5));
    assert!((row["S_hat"].as_f64().unwrap() - 33f64.log2() / 4.0).abs() < 1e-15);
    assert!((row["M_hat"].as_f64().unwrap() - 0.6875f64.log2() / 4.0).abs() < 1e-15);
    assert!(v["max_deviation"]["S"].as_f64().unwrap() > 0.0);

    let out = run(&[&p], &["verify", "-n", "4", "--format", "csv"]);
    let (header, rows) = csv_rows(&out);
    assert_eq!(header[..4], ["V", "alpha", "M", "M_hat"]);
    assert!(rows.iter().any(|r| r[0] == "-1.5"));
}

#[test]
fn exponent_curve_csv() {
    let ws = Workspace::new();
    let p = ws.file("p.json", "[0.5, 0.25, 0.25]");
    let out = run(&[&p], &["exponents", "--resolution", "3"]);
    assert_eq!(code(&out), 0);
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, ["V", "alpha", "M", "M_star", "S", "S_star"]);
    assert_eq!(rows.first().unwrap()[..2], ["-2", "-inf"]);
    assert_eq!(rows.last().unwrap()[..2], ["-1", "+inf"]);
    let neg_h = rows.iter().find(|r| r[0] == "-1.5").unwrap();
    assert_eq!(neg_h[2], "0");

    let u = ws.file("u.json", "[0.5, 0.5]");
    let out = run(&[&u], &["exponents"]);
    assert_eq!(code(&out), 0);
    let (_, rows) = csv_rows(&out);
    assert_eq!(rows, vec![vec!["-1", "nan", "0", "0", "1", "1"]]);
}

#[test]
fn entropy_values_and_sweep() {
    let ws = Workspace::new();
    let p = ws.file("p.json", "[0.5, 0.25, 0.25]");
    let out = run(&[&p], &["entropy", "--alpha", "0,1,2,inf"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let vals: Vec<&Value> = v["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| &x["renyi"])
        .collect();
    assert_eq!(vals[1].as_f64(), Some(1.5));
    assert_eq!(vals[3].as_f64(), Some(1.0));

    let out = run(&[&p], &["entropy", "--points", "5"]);
    let (_, rows) = csv_rows(&out);
    let alphas: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(
        alphas,
        [
            "0",
            "0.41421356237309503",
            "1",
            "2.4142135623730949",
            "+inf"
        ]
    );
}

#[test]
fn chain_report() {
    let ws = Workspace::new();
    let p = ws.file("p.json", "[0.4, 0.3, 0.2, 0.1]");
    let q = ws.file("q.json", "[0.5, 0.3, 0.2]");
    let out = run(&[&p, &q], &["chain", "--n-max", "3"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["strict_everywhere"], true);
    assert_eq!(v["first_n"], 1);
    assert_eq!(v["necessary_ok"], true);
    assert_eq!(v["status"], "consistent");

    let out = run(&[&p, &p], &["chain"]);
    assert_eq!(code(&out), 5);
}

#[test]
fn staircase_counts_are_decimal_strings() {
    let ws = Workspace::new();
    let p = ws.file("p.json", "[0.5, 0.25, 0.25]");
    let out = run(&[&p], &["staircase", "-n", "4"]);
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, ["log_value", "count", "level_mass"]);
    let counts: Vec<&str> = rows.iter().map(|r| r[1].as_str()).collect();
    assert_eq!(counts, ["1", "8", "24", "32", "16"]);

    let out = run(&[&p], &["staircase", "-n", "60", "--format", "json"]);
    let v = json(&out);
    let last = v["levels"].as_array().unwrap().last().unwrap();
    assert_eq!(last["count"], "1152921504606846976");
    assert_eq!(v["source_d"], 3);
}

#[test]
fn budget_from_env_and_flag() {
    let ws = Workspace::new();
    let p = ws.file("p.json", "[0.4, 0.3, 0.2, 0.1]");
    let path = p.to_str().unwrap();
    let bin = env!("CARGO_BIN_EXE_majorate");
    let out = Command::new(bin)
        .args(["staircase", path, "-n", "10"])
        .env("MAJORATE_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(code(&out), 4);
    let out = Command::new(bin)
        .args(["staircase", path, "-n", "10", "--budget", "1000"])
        .env("MAJORATE_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
}

#[test]
fn parse_and_domain_errors() {
    let ws = Workspace::new();
    let missing = ws.path().join("missing.json");
    assert_eq!(code(&run(&[&missing], &["entropy"])), 2);
    let bad = ws.file("bad.json", "[0.5, 0.6]");
    assert_eq!(code(&run(&[&bad], &["entropy"])), 2);
    assert_eq!(code(&run(&[&bad], &["entropy", "--normalize"])), 0);
    let junk = ws.file("junk.csv", "0.5\nabc\n");
    assert_eq!(code(&run(&[&junk], &["entropy"])), 2);
    let p = ws.file("p.json", "[0.5, 0.5]");
    assert_eq!(code(&run(&[&p], &["entropy", "--alpha", "abc"])), 2);
    assert_eq!(code(&run(&[&p], &["entropy", "--alpha", "-1"])), 5);
    assert_eq!(code(&majorate(&["frobnicate"])), 2);

    let trivial = ws.file("t.json", "[1]");
    assert_eq!(code(&run(&[&trivial], &["exponents"])), 5);
    assert_eq!(code(&run(&[&trivial], &["verify", "-n", "2"])), 5);
}

#[test]
fn output_file_and_determinism() {
    let ws = Workspace::new();
    let p = ws.file("p.json", "[0.35, 0.35, 0.1, 0.1, 0.1]");
    let q = ws.file("q.json", "[0.5, 0.3, 0.2]");
    let first = run(&[&p, &q], &["rate"]);
    let second = run(&[&p, &q], &["rate"]);
    assert_eq!(first.stdout, second.stdout);

    let target = ws.path().join("rate.json");
    let out = run(&[&p, &q], &["rate", "-o", target.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&target).unwrap(), first.stdout);
}

#[test]
fn every_json_report_reparses() {
    let ws = Workspace::new();
    let p = ws.file("p.json", "[0.5, 0.25, 0.25]");
    let q = ws.file("q.json", "[0.75, 0.25]");
    let cases: Vec<(Vec<&Path>, Vec<&str>)> = vec![
        (vec![&p], vec!["entropy", "--format", "json"]),
        (vec![&p, &q], vec!["rate", "--grid", "33"]),
        (
            vec![&p],
            vec!["exponents", "--format", "json", "--resolution", "2"],
        ),
        (vec![&p, &q], vec!["majorize", "-n", "2", "-m", "3"]),
        (vec![&p], vec!["verify", "-n", "3"]),
        (vec![&p, &q], vec!["chain", "--n-max", "2"]),
        (vec![&p], vec!["staircase", "-n", "3", "--format", "json"]),
    ];
    for (paths, flags) in cases {
        let out = run(&paths, &flags);
        let v = json(&out);
        assert!(v.is_object(), "{flags:?}");
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.ends_with('\n') && !text.contains('\r'));
    }
}
