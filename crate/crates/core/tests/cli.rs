use std::fs;
use std::process::{Command, Output};

fn hmxforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hmxforge"))
        .args(args)
        .env_remove("HMXFORGE_THREADS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn generate_writes_a_parseable_suite() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f.tests");
    let o = hmxforge(&[
        "generate", "fraction", "--operator", "hmx", "--seed", "3", "--budget-evals", "500",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("subject Fraction\nseed 3\n"));
    let t = hmxforge(&["trace", "fraction", out.to_str().unwrap(), "--test", "0"]);
    assert_eq!(t.status.code(), Some(0));
    let lines: Vec<serde_json::Value> = stdout(&t)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines[0]["record"], "test");
    assert_eq!(lines.last().unwrap()["record"], "summary");
}

#[test]
fn generate_json_is_deterministic() {
    let args = ["generate", "roman", "--seed", "7", "--budget-evals", "800", "--json"];
    let a = hmxforge(&args);
    let b = hmxforge(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_str(stdout(&a).trim()).unwrap();
    assert_eq!(v["evaluations_used"], 800);
}

#[test]
fn subject_file_and_mutants() {
    let fixture = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/straight.subj");
    let o = hmxforge(&["mutants", fixture]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().count() > 0);
    assert!(text.lines().all(|l| l.starts_with('#')));
}

#[test]
fn exit_codes() {
    assert_eq!(hmxforge(&["generate", "missing.subj"]).status.code(), Some(2));
    assert_eq!(hmxforge(&["generate", "fraction", "--bogus"]).status.code(), Some(1));
    assert_eq!(hmxforge(&["--help"]).status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("p.cfg");
    fs::write(&cfg, "eta_c = banana\n").unwrap();
    let o = hmxforge(&["experiment", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
    let bad = dir.path().join("bad.subj");
    fs::write(&bad, "subject A {").unwrap();
    fs::write(&cfg, format!("subjects = {}\n", bad.display())).unwrap();
    assert_eq!(hmxforge(&["experiment", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn experiment_then_stats() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("p.cfg");
    let out = dir.path().join("out");
    fs::write(
        &cfg,
        format!("subjects = roman\nseeds = 0..1\nbudget = 200\noutput_dir = {}\n", out.display()),
    )
    .unwrap();
    let o = hmxforge(&["experiment", cfg.to_str().unwrap(), "--threads", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("| Branch coverage |"));
    for f in ["runs.csv", "timings.csv", "runs.jsonl", "stats.csv", "summary.md"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let before = fs::read(out.join("stats.csv")).unwrap();
    let again = dir.path().join("again");
    let s = hmxforge(&[
        "stats",
        out.join("runs.csv").to_str().unwrap(),
        "--out-dir",
        again.to_str().unwrap(),
    ]);
    assert_eq!(s.status.code(), Some(0));
    assert_eq!(fs::read(again.join("stats.csv")).unwrap(), before);
}
