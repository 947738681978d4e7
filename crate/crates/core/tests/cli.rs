//! End-to-end runs of the `morphic` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn morphic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_morphic")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    let mut v: Value = serde_json::from_slice(&out.stdout).expect("json on stdout");
    if let Some(o) = v.as_object_mut() {
        o.remove("timing");
    }
    v
}

#[test]
fn n_value_of_four_primes() {
    let out = morphic(&["--json", "n-value", "--p0", "2,3,5,7"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["n_value"], 564);
    assert_eq!(v["exact"], true);
}

#[test]
fn solve_exit_codes() {
    assert_eq!(code(&morphic(&["solve", "--p0", "2,3", "--limit", "4"])), 0);
    assert_eq!(code(&morphic(&["solve", "--p0", "2,3,5", "--limit", "532"])), 0);
    let out = morphic(&["--json", "solve", "--p0", "2,3,5", "--limit", "533"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["outcome"], "unavoidable");
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(code(&morphic(&["frobnicate"])), 64);
    assert_eq!(code(&morphic(&["solve", "--p0", "2,3", "--limit", "3000000000"])), 64);
    assert_eq!(code(&morphic(&["solve", "--p0", "2,4", "--limit", "10"])), 64);
    assert_eq!(code(&morphic(&["solve", "--limit", "10"])), 64);
}

#[test]
fn json_output_is_deterministic() {
    let args = ["--json", "solve", "--p0", "2,3,5", "--limit", "300"];
    assert_eq!(json(&morphic(&args)), json(&morphic(&args)));
}

#[test]
fn verify_bundled_and_written_certificates() {
    let out = morphic(&["--json", "verify", "--fixture", "z3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["interval"], serde_json::json!([1, 4632]));

    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("c.json");
    let c = cert.to_str().unwrap();
    assert_eq!(code(&morphic(&["solve", "--p0", "2,3,5", "--limit", "200", "--out", c])), 0);
    assert_eq!(code(&morphic(&["verify", "--cert", c])), 0);

    // flip one value: the claim must now be rejected
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    let entry = &mut doc["assignment"][0][1];
    *entry = Value::from(1 - entry.as_u64().unwrap());
    std::fs::write(&cert, doc.to_string()).unwrap();
    assert_eq!(code(&morphic(&["verify", "--cert", c])), 1);

    assert_eq!(code(&morphic(&["verify", "--cert", "/nonexistent/c.json"])), 74);
    std::fs::write(&cert, "{not json").unwrap();
    assert_eq!(code(&morphic(&["verify", "--cert", c])), 64);
}

#[test]
fn triples_listing() {
    let out = morphic(&["triples", "--limit", "532", "--primitive", "--count"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("84"));
    let out = morphic(&["--json", "triples", "--limit", "532", "--primitive", "--oddsupp-first", "13", "--count"]);
    assert!(out.stdout.windows(2).any(|w| w == b"32"));
}

#[test]
fn cnf_export_and_unsat_decode() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("i.cnf");
    let c = cnf.to_str().unwrap();
    assert_eq!(code(&morphic(&["export-cnf", "--p0", "2,3,5", "--limit", "100", "--out", c])), 0);
    let text = std::fs::read_to_string(&cnf).unwrap();
    assert!(text.lines().any(|l| l.starts_with("p cnf ")));

    // build a model with the library's own solver and feed it back
    let inst = morphic::cnf::CnfInstance::from_dimacs(&text).unwrap();
    let model = morphic::cnf::dpll(inst.num_vars(), &inst.clauses).unwrap();
    let line: Vec<String> = model.iter().map(|l| l.to_string()).collect();
    let model_path = dir.path().join("m.txt");
    std::fs::write(&model_path, format!("s SATISFIABLE\nv {} 0\n", line.join(" "))).unwrap();
    let cert = dir.path().join("c.json");
    let out = morphic(&[
        "decode-model", "--cnf", c, "--model", model_path.to_str().unwrap(), "--out", cert.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(Path::new(&cert).exists());
    assert_eq!(code(&morphic(&["verify", "--cert", cert.to_str().unwrap()])), 0);

    std::fs::write(&model_path, "s UNSATISFIABLE\n").unwrap();
    let out = morphic(&["decode-model", "--cnf", c, "--model", model_path.to_str().unwrap()]);
    assert_ne!(code(&out), 0);
}

#[test]
fn sweep_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let journal = dir.path().join("j.jsonl");
    let j = journal.to_str().unwrap();
    let out = morphic(&["sweep", "--k", "2", "--bound", "13", "--journal", j, "--threads", "1"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read_to_string(&journal).unwrap().lines().count(), 15);
    let out = morphic(&["--json", "report", "--journal", j]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["total"], 15);
    // resuming a finished sweep computes nothing
    let out = morphic(&["--json", "sweep", "--k", "2", "--bound", "13", "--journal", j, "--resume"]);
    assert_eq!(code(&out), 0);
}
