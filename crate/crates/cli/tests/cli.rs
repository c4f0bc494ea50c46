use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::NamedTempFile;

const WORKED: &str = "6 6
3 2 3 5 1 2
1 3 4 2 3 4
3 2 3 5 5 6
1 3 4 2 2 1
2 1 3 2 2 3
2 1 3 2 2 3
";

fn file(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tridecomp"))
        .args(args)
        .output()
        .unwrap()
}

fn path(f: &NamedTempFile) -> &str {
    f.path().to_str().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap().to_string())
        .collect()
}

#[test]
fn worked_example_json() {
    let input = file(WORKED);
    let out = run(&["decompose", "--input", path(&input), "--split", "pow2", "--check"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    assert_eq!(doc["rank"], 5);
    assert_eq!(strings(&doc["alphas"]), ["3", "7", "10", "40", "-80"]);
    assert_eq!(doc["verified"], true);
    assert_eq!(doc["P"], serde_json::json!([0, 1, 3, 4, 2, 5]));
    assert_eq!(doc["D"].as_array().unwrap().len(), 6);
    assert_eq!(doc["D"][4], serde_json::json!({"num": "-1", "den": "3200"}));
}

#[test]
fn identity_gives_unit_factors() {
    let input = file("3 3\n1 0 0\n0 1 0\n0 0 1\n");
    let out = run(&["decompose", "--input", path(&input), "--domain", "int"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    let unit = serde_json::json!([["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]]);
    assert_eq!(doc["L"], unit);
    assert_eq!(doc["U"], unit);
    assert_eq!(doc["domain"], "int");
}

#[test]
fn every_domain_and_policy_verifies() {
    let cases = [
        ("int", "3 2\n1 2\n3 4\n5 6\n"),
        ("bigint", "2 3\n123456789012345678901 2 0\n4 5 6\n"),
        ("rational", "2 2\n1/2 1/3\n1/4 1/5\n"),
        ("poly", "2 2\nx 1\nx^2-1 x+1\n"),
    ];
    for (domain, text) in cases {
        for split in ["pow2", "half", "1"] {
            let input = file(text);
            let out = run(&["decompose", "--input", path(&input), "--domain", domain, "--split", split, "--check"]);
            assert_eq!(out.status.code(), Some(0), "{domain} {split}: {}", String::from_utf8_lossy(&out.stderr));
            assert_eq!(json(&out)["verified"], true);
        }
    }
}

#[test]
fn random_five_by_five_checks() {
    let input = file("5 5\n4 -7 2 0 9\n-3 1 8 -6 5\n7 2 -9 3 1\n0 -4 6 2 -8\n5 3 -1 -2 4\n");
    let out = run(&["decompose", "--input", path(&input), "--check", "--bruhat"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["verified"], true);
    assert_eq!(doc["bruhat"]["SD"]["perm"].as_array().unwrap().len(), 5);
}

#[test]
fn parse_failures_exit_one() {
    let bad_token = file("2 2\n1 2\n3 q\n");
    let out = run(&["decompose", "--input", path(&bad_token)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3, column 3"));

    let short = file("2 2\n1 2 3\n");
    assert_eq!(run(&["decompose", "--input", path(&short)]).status.code(), Some(1));
    assert_eq!(run(&["decompose", "--input", "/nonexistent/matrix"]).status.code(), Some(1));
    assert_eq!(run(&["decompose", "--input", path(&short), "--split", "third"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn overflow_exits_three() {
    let input = file("2 2\n9223372036854775807 2\n3 9223372036854775807\n");
    let out = run(&["decompose", "--input", path(&input), "--domain", "int"]);
    assert_eq!(out.status.code(), Some(3));
    let ok = run(&["decompose", "--input", path(&input), "--domain", "bigint"]);
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn document_round_trips_through_verify() {
    let input = file(WORKED);
    let out = run(&["decompose", "--input", path(&input)]);
    let factors = file(std::str::from_utf8(&out.stdout).unwrap());
    let checked = run(&["verify", "--input", path(&input), "--factors", path(&factors)]);
    assert_eq!(checked.status.code(), Some(0));
    let doc = json(&checked);
    assert_eq!(doc["verified"], true);
    let mut original = json(&out);
    original["verified"] = Value::Bool(true);
    assert_eq!(doc, original);
}

#[test]
fn injected_fault_is_never_verified() {
    let input = file(WORKED);
    let out = run(&["decompose", "--input", path(&input)]);
    for (factor, i, j) in [("L", 3, 1), ("U", 0, 4), ("M", 2, 0), ("W", 1, 3)] {
        let mut doc = json(&out);
        let cell = &mut doc[factor][i][j];
        let bumped = cell.as_str().unwrap().parse::<i64>().unwrap() + 1;
        *cell = Value::String(bumped.to_string());
        let factors = file(&doc.to_string());
        let checked = run(&["verify", "--input", path(&input), "--factors", path(&factors)]);
        assert_eq!(checked.status.code(), Some(2), "fault in {factor}");
        assert_eq!(json(&checked)["verified"], false, "fault in {factor}");
    }
    let mut doc = json(&out);
    doc["P"] = serde_json::json!([1, 0, 2, 3, 4, 5]);
    let factors = file(&doc.to_string());
    let checked = run(&["verify", "--input", path(&input), "--factors", path(&factors)]);
    assert_eq!(checked.status.code(), Some(2));
}

#[test]
fn pretty_lays_out_five_factors() {
    let input = file(WORKED);
    let out = run(&["decompose", "--input", path(&input), "--emit", "pretty", "--check"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let labels = text.lines().nth(2).unwrap();
    let order: Vec<&str> = labels.split_whitespace().collect();
    assert_eq!(order, ["P", "L", "D", "U", "Q"]);
    assert!(text.contains("-1/3200"));
    assert!(text.contains("alphas [3, 7, 10, 40, -80]"));
}

#[test]
fn bench_is_deterministic() {
    let args = ["bench", "--sizes", "4,8,16", "--seed", "5", "--reps", "1"];
    let a = String::from_utf8(run(&args).stdout).unwrap();
    let b = String::from_utf8(run(&args).stdout).unwrap();
    let checksums = |s: &str| -> Vec<String> {
        s.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().to_string()).collect()
    };
    assert_eq!(a.lines().count(), 4);
    assert_eq!(checksums(&a), checksums(&b));
    assert_eq!(run(&["bench", "--sizes", "0"]).status.code(), Some(1));
}

#[test]
fn stdin_input() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_tridecomp"))
        .args(["decompose", "--input", "-"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"2 2\n3 2\n1 3\n").unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(strings(&json(&out)["alphas"]), ["3", "7"]);
}
