use std::io::Write;
use std::process::{Command, Output, Stdio};

use grassmann_designs::io::{config_to_json, parse_configuration, to_json_string};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_grassdesign"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn dim_and_bound() {
    let o = run(&["dim", "--d", "3", "--ranks", "1,2", "--t", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "7");

    let o = run(&["dim", "--d", "3", "--ranks", "1", "--t", "2", "--table"]);
    let text = stdout(&o);
    assert!(text.starts_with("15\n"), "{text}");
    assert!(text.contains("(4)\t9\t1"), "{text}");

    let o = run(&["bound", "--d", "5", "--masses", "1:1,2:5/3", "--t", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("131/45 ≈ 2.9111"), "{}", stdout(&o));
}

#[test]
fn family_pipes_into_verify() {
    let family = run(&["family", "--name", "r3-2design", "--m2", "3/2"]);
    assert_eq!(family.status.code(), Some(0), "{}", stderr(&family));
    let doc: Value = serde_json::from_slice(&family.stdout).unwrap();
    assert_eq!(doc["meta"]["report"]["verdict"], "design");

    let verified = run_stdin(&["verify", "--t", "2"], &family.stdout);
    assert_eq!(verified.status.code(), Some(0), "{}", stderr(&verified));
    let report: Value = serde_json::from_slice(&verified.stdout).unwrap();
    assert_eq!(report["verdict"], "design");
    assert!(report["gap"].as_f64().unwrap().abs() < 1e-12);
    assert_eq!(report["bound_exact"], "6");

    let uncertified = run_stdin(&["verify", "--t", "3"], &family.stdout);
    assert_eq!(uncertified.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&uncertified.stdout).unwrap();
    assert_eq!(report["verdict"], "neither");
}

#[test]
fn files_round_trip_bit_identically() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("r4.json");
    let report = dir.path().join("report.json");
    let c = config.to_str().unwrap();
    let r = report.to_str().unwrap();

    let o = run(&["family", "--name", "r4-2design", "--m2", "1.1", "--output", c]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&config).unwrap();

    // Reading and rewriting reproduces the file byte for byte.
    let loaded = parse_configuration(&text).unwrap();
    let rewritten = to_json_string(&config_to_json(&loaded.config, Some(loaded.meta.clone())));
    assert_eq!(rewritten + "\n", text);

    let o = run(&["verify", "--t", "2", "--input", c, "--output", r]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let from_file = std::fs::read_to_string(&report).unwrap();
    let piped = run_stdin(&["verify", "--t", "2"], text.as_bytes());
    assert_eq!(stdout(&piped), from_file);
    let stored: Value = serde_json::from_str(&from_file).unwrap();
    assert_eq!(stored, loaded.meta["report"]);
}

#[test]
fn optimize_is_deterministic() {
    let args = [
        "optimize", "--d", "2", "--counts", "1:2", "--masses", "1:1", "--t", "1", "--restarts", "3", "--seed", "5",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let doc: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc["meta"]["best_seed"].as_u64().map(|s| (5..8).contains(&s)), Some(true));
    assert_eq!(doc["meta"]["restarts"].as_array().unwrap().len(), 3);
    assert!((doc["meta"]["report"]["ffp"].as_f64().unwrap() - 0.5).abs() < 1e-10);
}

#[test]
fn kernel_eval_diagonal() {
    let family = run(&["family", "--name", "lines-hyperplane", "--d", "4", "--m", "1/2"]);
    assert_eq!(family.status.code(), Some(0), "{}", stderr(&family));
    let o = run_stdin(&["kernel-eval", "--pi", "(1)"], &family.stdout);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    let values = doc["values"].as_array().unwrap();
    for (i, row) in values.iter().enumerate() {
        // dim of the (2) irrep of O(4) is 9.
        assert!((row[i].as_f64().unwrap() - 9.0).abs() < 1e-9);
    }
}

#[test]
fn errors_and_exit_codes() {
    let o = run_stdin(&["verify", "--t", "2"], b"{\"d\": 3,\n \"points\": [}");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let o = run(&["verify", "--t", "1", "--input", "/nonexistent/config.json"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["dim", "--d", "3", "--ranks", "3", "--t", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!stderr(&o).is_empty());

    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("optimize"));

    let o = run(&["family", "--name", "r3-2design"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--m2"), "{}", stderr(&o));
}

#[test]
fn table1_lists_five_rows() {
    let o = run(&["table1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r.ends_with("design")), "{text}");
    assert!(rows[4].starts_with("3\t3\t6\t6\t1\t1"), "{text}");
}
