use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn dlbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dlbound"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

const PATH4: &str = "n 4\n1 2\n2 3\n3 4\n";
const EXAMPLE: &str = "# six nodes, leaders 1 and 6\nn 6\n1 2\n1 3\n2 4\n3 5\n4 5\n5 6\n";

#[test]
fn bound_on_path() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "path4.txt", PATH4);
    let v = json(&dlbound(&["bound", "--input", s(&p), "--leaders", "1"]));
    assert_eq!((v["delta"].as_u64(), v["mu"].as_u64(), v["upsilon"].as_u64()), (Some(4), Some(4), Some(4)));
    assert_eq!(v["leaders"], serde_json::json!([1]));
    assert_eq!(v["witness"]["nodes"].as_array().unwrap().len(), 4);
}

#[test]
fn bound_csv() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "path4.txt", PATH4);
    let out = dlbound(&["bound", "--input", s(&p), "--leaders", "1", "--csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let record: Vec<&str> = lines.next().unwrap().split(',').collect();
    let delta = header.iter().position(|h| *h == "delta").unwrap();
    assert_eq!(record[delta], "4");
}

#[test]
fn disconnected_is_a_domain_error() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "split.txt", "n 4\n1 2\n3 4\n");
    let out = dlbound(&["bound", "--input", s(&p), "--leaders", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("connected"));
    assert!(out.stdout.is_empty());
    let out = dlbound(&["check-theorem", "--input", s(&p), "--leaders", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_input_reports_line() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "bad.txt", "n 3\n1 2\n2 x\n");
    let out = dlbound(&["bound", "--input", s(&p), "--leaders", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(dlbound(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(dlbound(&["bound"]).status.code(), Some(2));
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "path4.txt", PATH4);
    let out = dlbound(&["bound", "--input", s(&p), "--leaders", "9"]);
    assert_eq!(out.status.code(), Some(2));
    let out = dlbound(&["bound", "--input", s(&p), "--leaders", "1,1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_theorem_on_example() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "ex.txt", EXAMPLE);
    let args = ["check-theorem", "--input", s(&p), "--leaders", "1,6", "--trials", "20", "--seed", "7"];
    let v = json(&dlbound(&args));
    assert_eq!(v["passed"], Value::Bool(true));
    assert_eq!(v["trials"], 20);
    assert!(v["min_rank"].as_u64().unwrap() >= 5);
    let threaded = dlbound(&[&args[..], &["--threads", "1"]].concat());
    assert_eq!(json(&threaded), v);
}

#[test]
fn check_lemma1_passes() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "ex.txt", EXAMPLE);
    let v = json(&dlbound(&["check-lemma1", "--input", s(&p), "--trials", "5", "--seed", "3"]));
    assert_eq!(v["property"], "power_zero_pattern");
    assert_eq!(v["passed"], Value::Bool(true));
}

#[test]
fn dist_matrix_and_leader_vectors() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "ex.txt", EXAMPLE);
    let v = json(&dlbound(&["dist", "--input", s(&p), "--leaders", "1,6"]));
    assert_eq!(
        v["dist"],
        serde_json::json!([[0, 3], [1, 3], [1, 2], [2, 2], [2, 1], [3, 0]])
    );
    let split = write(&dir, "split.txt", "n 3\n1 2\n");
    let v = json(&dlbound(&["dist", "--input", s(&split)]));
    assert_eq!(v["dist"][0], serde_json::json!([0, 1, null]));
    let out = dlbound(&["dist", "--input", s(&split), "--csv"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "0,1,\n1,0,\n,,0\n");
}

#[test]
fn rank_modes() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "c6.txt", "n 6\n1 2\n2 3\n3 4\n4 5\n5 6\n6 1\n");
    let exact = json(&dlbound(&["rank", "--input", s(&p), "--leaders", "1"]));
    assert_eq!(exact["rank"], 4);
    assert_eq!(exact["method"], "exact");
    let num = json(&dlbound(&["rank", "--input", s(&p), "--leaders", "1", "--method", "numerical"]));
    assert_eq!(num["rank"], 4);
    assert!(num["tolerance"].is_number());
    let sampled = json(&dlbound(&["rank", "--input", s(&p), "--leaders", "1,2", "--sample", "--seed", "4"]));
    assert_eq!(sampled["rank"], 6);
    assert_eq!(sampled["weights"]["kind"], "random_integer");
}

#[test]
fn select_leaders_modes_and_budget() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "ex.txt", EXAMPLE);
    let v = json(&dlbound(&["select-leaders", "--input", s(&p), "--k", "6"]));
    assert_eq!(v["optimal"], Value::Bool(true));
    let size = v["leaders"].as_array().unwrap().len();
    let g = json(&dlbound(&["select-leaders", "--input", s(&p), "--k", "6", "--mode", "greedy"]));
    assert!(g["leaders"].as_array().unwrap().len() >= size);
    let out = dlbound(&["select-leaders", "--input", s(&p), "--k", "6", "--budget", &(size - 1).to_string()]);
    assert_eq!(out.status.code(), Some(1));
    let out = dlbound(&["select-leaders", "--input", s(&p), "--k", "7"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gen_output_feeds_every_command() {
    let dir = TempDir::new().unwrap();
    let out = dlbound(&["gen", "--family", "ba", "--n", "9", "--m", "2", "--seed", "5"]);
    assert!(out.status.success());
    let again = dlbound(&["gen", "--family", "ba", "--n", "9", "--m", "2", "--seed", "5"]);
    assert_eq!(out.stdout, again.stdout);
    let p = write(&dir, "ba.txt", std::str::from_utf8(&out.stdout).unwrap());
    let f = s(&p);
    for args in [
        vec!["dist", "--input", f],
        vec!["bound", "--input", f, "--leaders", "1,2"],
        vec!["rank", "--input", f, "--leaders", "1,2"],
        vec!["check-lemma1", "--input", f, "--trials", "2"],
        vec!["check-theorem", "--input", f, "--leaders", "1,2", "--trials", "2"],
        vec!["select-leaders", "--input", f, "--k", "5"],
    ] {
        json(&dlbound(&args));
    }
    let er = dir.path().join("er.txt");
    let out = dlbound(&["gen", "--family", "er", "--n", "12", "--p", "0.3", "--connected", "--out", s(&er)]);
    assert!(out.status.success());
    json(&dlbound(&["bound", "--input", s(&er), "--leaders", "3"]));
    assert_eq!(dlbound(&["gen", "--family", "er", "--n", "5"]).status.code(), Some(2));
}

#[test]
fn experiment_csv_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("er.csv");
    let args = [
        "experiment", "--family", "er", "--grid", "0.3,0.6", "--n", "15", "--trials", "6", "--leaders",
        "2", "--seed", "11",
    ];
    let a = dlbound(&[&args[..], &["--out", s(&out)]].concat());
    assert!(a.status.success());
    let b = dlbound(&[&args[..], &["--threads", "2"]].concat());
    let file = std::fs::read(&out).unwrap();
    assert_eq!(file, b.stdout);
    let text = String::from_utf8(file).unwrap();
    assert!(text.starts_with("param,mean_delta,mean_mu,mean_upsilon,trials_used\n"));
    assert_eq!(text.lines().count(), 3);
    let bad = dlbound(&["experiment", "--family", "ba", "--grid", "1.5", "--n", "10"]);
    assert_eq!(bad.status.code(), Some(2));
}
