//! The `fluence` binary, run as a subprocess.

use std::path::Path;
use std::process::{Command, Output};

fn fluence(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fluence")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn status(args: &[&str]) -> i32 {
    fluence(args).status.code().expect("exited normally")
}

#[test]
fn run_prints_the_value() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "main.fld", "def xs = [1, 2, 3]\nsum(xs) * 2\n");
    let out = fluence(&["run", &f]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "12\n");
}

#[test]
fn exit_statuses_follow_the_kind_of_failure() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(status(&["run", &write(d, "syntax.fld", "def = 3\n")]), 2);
    assert_eq!(status(&["run", &write(d, "adjacent.fld", "def f([]): 0\ndef g(x): x\ndef f(Cons(x, xs)): 1\nf([])\n")]), 3);
    write(d, "a.fld", "import \"b\"\ndef x = 1\n");
    write(d, "b.fld", "import \"a\"\ndef y = 2\n");
    assert_eq!(status(&["run", &write(d, "cyclic.fld", "import \"a\"\nx\n")]), 3);
    assert_eq!(status(&["run", &write(d, "noresult.fld", "def x = 1\n")]), 3);
    assert_eq!(status(&["run", &write(d, "eval.fld", "1 / 0\n")]), 4);
    assert_eq!(status(&["run", &write(d, "unbound.fld", "nowhere + 1\n")]), 4);
    assert_eq!(status(&["run", &d.join("absent.fld").to_string_lossy()]), 5);
    assert_eq!(status(&["run", &write(d, "imports.fld", "import \"absent\"\n1\n")]), 5);
}

#[test]
fn configuration_errors_exit_with_five() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let f = write(d, "main.fld", "def data = [1, 2]\nsum(data)\n");
    let missing = d.join("missing.json");
    assert_eq!(status(&["run", &f, "--config", &missing.to_string_lossy()]), 5);

    let bad = write(d, "bad.json", "{\"inputz\": []}");
    assert_eq!(status(&["export", &f, "--config", &bad]), 5);

    let unbound = write(d, "unbound.json", "{\"inputs\": [\"nothing\"]}");
    assert_eq!(status(&["export", &f, "--config", &unbound]), 5);
}

#[test]
fn export_writes_a_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let f = write(d, "main.fld", "def data = [1, 2]\n@doc(p\"the total\") sum(data)\n");
    write(d, "fluence.json", "{\"inputs\": [\"data\"], \"out\": \"out/b.json\"}");
    std::fs::create_dir(d.join("out")).unwrap();
    let out = fluence(&["export", &f]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let bundle: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("out/b.json")).unwrap()).unwrap();
    assert_eq!(bundle["entry"], "main.fld");
    assert_eq!(bundle["inputs"][0]["name"], "data");
    assert_eq!(bundle["intermediates"].as_array().unwrap().len(), 1);
    assert_eq!(bundle["output"]["kind"], "scalar");

    let explicit = d.join("elsewhere.json");
    assert!(fluence(&["export", &f, "--out", &explicit.to_string_lossy()]).status.success());
    assert!(explicit.exists());
}

#[test]
fn views_that_cannot_be_built_exit_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "main.fld", "Matrix(2, 2, [[1, 2], [3]])\n");
    assert_eq!(status(&["run", &f]), 0);
    assert_eq!(status(&["export", &f]), 4);
}
