use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_toricverify"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn doc(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const LINE_F5: &str = r#"{"dimension": 1, "normals": [[1], [-1]], "areas": ["1", "1"], "field": {"char": 5}}"#;
const PLANE_F5: &str = r#"{"dimension": 2, "normals": [[1, 0], [0, 1], [-1, -1]], "areas": ["1", "1", "1"], "field": {"char": 5}}"#;

#[test]
fn report_is_written_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = doc(dir.path(), "line.json", LINE_F5);
    let cache = dir.path().join("cache");
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for out in [&a, &b] {
        let o = run(&["report", "--config", &cfg, "--seed", "7", "--cache", cache.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let v: serde_json::Value = serde_json::from_slice(&ta).unwrap();
    assert_eq!(v["summands"].as_array().unwrap().len(), 2);
    assert_eq!(v["passed"], true);
}

#[test]
fn subcommands_print_their_sections() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = doc(dir.path(), "line.json", LINE_F5);
    let o = run(&["potential", "--config", &cfg]);
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "(1)*tau^(-1) + (1)*tau^(1)");
    let o = run(&["jacobian", "--config", &cfg]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["dim"], 2);
    let o = run(&["summands", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["pearl-oracle", "--config", &cfg, "--level", "full"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let plane = doc(dir.path(), "plane.json", PLANE_F5);
    let o = run(&["report", "--config", &plane]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("extend field"));
    let bad = doc(dir.path(), "bad.json", &LINE_F5.replace(r#"["1", "1"]"#, r#"["0", "1"]"#));
    assert_eq!(run(&["report", "--config", &bad]).status.code(), Some(2));
    assert_eq!(run(&["report"]).status.code(), Some(2));
    assert_eq!(run(&["report", "--config", &plane, "--precision", "-1"]).status.code(), Some(2));
}

#[test]
fn quick_verification_passes() {
    let o = run(&["verify", "--level", "quick"]);
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(o.status.code(), Some(0), "{err}");
    assert!(err.lines().filter(|l| l.starts_with("criterion")).count() >= 9);
}
