use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_retargeter"));
    c.env_remove("RETARGETER_FUEL");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

fn file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_programs() {
    let dir = TempDir::new().unwrap();
    let add = file(&dir, "add42.tgt", "add 42\n");
    let mul0 = file(&dir, "mul0.tgt", "mul 0");
    let seq = file(&dir, "seq.tgt", "add 2 ; mul -3");
    assert_eq!(stdout(&run(&["run", s(&add), "--input", "5"])), "47");
    assert_eq!(stdout(&run(&["run", s(&mul0), "--input", "9"])), "0");
    assert_eq!(stdout(&run(&["run", s(&seq), "--input", "4"])), "-18");
    let bad = file(&dir, "bad.tgt", "sub 3");
    assert_eq!(run(&["run", s(&bad), "--input", "1"]).status.code(), Some(2));
}

#[test]
fn analyze_programs() {
    let dir = TempDir::new().unwrap();
    let add = file(&dir, "add42.tgt", "add 42");
    let neg = file(&dir, "m.tgt", "mul -3");
    assert_eq!(stdout(&run(&["analyze", s(&add), "--domain", "interval", "--input", "5"])), "[47,47]");
    assert_eq!(stdout(&run(&["analyze", s(&add), "--abs-input", "[0,10]"])), "[42,52]");
    assert_eq!(stdout(&run(&["analyze", s(&neg), "--domain", "sign", "--input", "5"])), "{-}");
    assert_eq!(run(&["analyze", s(&add), "--abs-input", "[0,"]).status.code(), Some(2));
    let src = file(&dir, "p.src", "(* x x)");
    assert_eq!(stdout(&run(&["analyze", s(&src), "--domain", "sign", "--input", "-4"])), "{+}");
}

#[test]
fn fuel_from_environment() {
    let dir = TempDir::new().unwrap();
    let add = file(&dir, "add42.tgt", "add 42");
    let o = bin().env("RETARGETER_FUEL", "5").args(["analyze", s(&add), "--input", "5"]).output().unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn retarget_then_analyze() {
    let dir = TempDir::new().unwrap();
    let add = file(&dir, "add42.tgt", "add 42");
    let res = dir.path().join("single.met");
    let o = run(&["retarget", "--target", "single", "--emit", s(&res)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("has_match    false"));
    let text = fs::read_to_string(&res).unwrap();
    let again = dir.path().join("again.met");
    run(&["retarget", "--target", "single", "--emit", s(&again)]);
    assert_eq!(fs::read_to_string(&again).unwrap(), text);

    for (flag, value) in [("--input", "5"), ("--abs-input", "[0,10]")] {
        let meta = stdout(&run(&["analyze", s(&add), flag, value]));
        let spec = stdout(&run(&["analyze-specialized", s(&res), s(&add), flag, value]));
        assert_eq!(meta, spec);
    }
    let bad = file(&dir, "bad.met", "fun i -> (");
    assert_eq!(run(&["analyze-specialized", s(&bad), s(&add), "--input", "1"]).status.code(), Some(2));
    let open = file(&dir, "open.met", "junk");
    assert_eq!(run(&["analyze-specialized", s(&open), s(&add), "--input", "1"]).status.code(), Some(2));

    let seq = dir.path().join("seq2.met");
    let o = run(&["--output", "json", "retarget", "--target", "seq2", "--emit", s(&seq)]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["stats"]["has_match"], false);
    let prog = file(&dir, "s.tgt", "add 1 ; mul 2");
    assert_eq!(stdout(&run(&["analyze-specialized", s(&seq), s(&prog), "--input", "3"])), "[8,8]");
}

#[test]
fn check_and_bench() {
    let o = run(&["check", "--trials", "100", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = run(&["--output", "json", "bench", "--trials", "50", "--target", "seq2", "--domain", "interval"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let report = &v[0];
    let mut keys: Vec<&str> = report.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    keys.sort();
    assert_eq!(
        keys,
        ["domain", "failures", "kind", "mean_meta_steps", "mean_spec_steps", "mode", "ratio", "seed", "target", "trials"]
    );
    assert!(report["ratio"].as_f64().unwrap() > 1.0);
    let o = run(&["check", "--trials", "0"]);
    assert!(o.status.success());
    let a = stdout(&run(&["--output", "json", "check", "--trials", "20", "--seed", "9"]));
    let b = stdout(&run(&["--output", "json", "check", "--trials", "20", "--seed", "9"]));
    assert_eq!(a, b);
}
