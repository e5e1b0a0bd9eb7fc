use std::path::Path;
use std::process::{Command, Output};

fn idealkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_idealkit"))
        .args(args)
        .env_remove("IDEALKIT_WINDOW")
        .env_remove("IDEALKIT_THREADS")
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn eval_prints_exact_value() {
    let dir = tempfile::tempdir().unwrap();
    let e = write(dir.path(), "mu.sx", "(measure ((0 1/2) (1 1/4) (9 3)))");
    let out = idealkit(&["eval", &e, "--set", "(set 0 1)"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "3/4\n");

    let out = idealkit(&["eval", &e, "--set", "(set 0 1)", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["command"], "eval");
    assert_eq!(v["outcome"], "ok");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.sx", "(measure ((0 1/2)");
    assert_eq!(idealkit(&["eval", &bad, "--set", "(set 0)"]).status.code(), Some(2));
    assert_eq!(idealkit(&["no-such-command"]).status.code(), Some(2));

    let e = write(dir.path(), "mu.sx", "(measure ((0 1)))");
    let out = idealkit(&["eval", &e, "--set", "(set 5000)"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(idealkit(&["eval", &e, "--set", "(set 5000)", "--window", "8192"]).status.code(), Some(0));
}

#[test]
fn ksf_violation_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let e = write(dir.path(), "mu.sx", "(measure ((0 1) (1 1) (2 1) (3 1) (4 1)))");
    let fam = write(dir.path(), "fam.json", "[[0], [2], [4]]");
    let args = |eps: &'static str| {
        ["check-ksf", e.as_str(), "--family", fam.as_str(), "--cuts", "1,3", "--epsilon", eps, "--maxlen", "2"]
            .map(str::to_owned)
    };
    assert_eq!(idealkit(&args("2").each_ref().map(String::as_str)).status.code(), Some(1));
    assert_eq!(idealkit(&args("3").each_ref().map(String::as_str)).status.code(), Some(0));
}
