use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fslattice(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fslattice"))
        .args(args)
        .env_remove("FSLATTICE_CAP")
        .output()
        .expect("spawn fslattice")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn fs_check_returns_a_representation() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", "[[1,1],[2,2],[4,1]]");
    let v = json(&fslattice(&["fs", "check", "--generators", &g, "--target", "5,2"]));
    assert_eq!(v["member"], true);
    assert_eq!(v["representation"]["members"], serde_json::json!([[1, 1], [4, 1]]));
    let v = json(&fslattice(&["fs", "check", "--generators", &g, "--target", "2,1"]));
    assert_eq!(v["member"], false);
}

#[test]
fn fs_enumerate_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", "[[1,0],[0,1],[1,1]]");
    let reach = dir.path().join("reach.json");
    let pgm = dir.path().join("reach.pgm");
    let out = fslattice(&[
        "fs", "enumerate", "--generators", &g, "--box", "0,0,3,3",
        "--out", reach.to_str().unwrap(), "--heatmap", pgm.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&reach).unwrap()).unwrap();
    assert_eq!(v["count"], 7);
    let img = std::fs::read_to_string(&pgm).unwrap();
    assert!(img.starts_with("P2\n4 4\n255\n"));
    // top row is y = 3: nothing reaches it
    assert_eq!(img.lines().nth(3).unwrap(), "0 0 0 0");
}

#[test]
fn cone_build_and_decompose() {
    let dir = tempfile::tempdir().unwrap();
    let x = dir.path().join("X.json");
    let out = fslattice(&["cone", "build", "--v", "1,2;2,1", "--depth", "6", "--out", x.to_str().unwrap()]);
    assert!(out.status.success());
    let spec = write(dir.path(), "cone.json", r#"{"v":[[1,2],[2,1]]}"#);
    let v = json(&fslattice(&["cone", "decompose", "--spec", &spec, "--point", "9,18"]));
    assert_eq!(v["members"], serde_json::json!([[1, 2], [8, 16]]));
    let v = json(&fslattice(&["cone", "verify", "--spec", &spec, "--max", "30", "--oracle-max", "20"]));
    assert_eq!(v["pass"], true);
}

#[test]
fn cone_decompose_rejects_points_outside() {
    let out = fslattice(&["cone", "decompose", "--v", "1,2;2,1", "--point", "5,1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn dyadic_commands() {
    let v = json(&fslattice(&["dyadic", "check", "--point", "5,3"]));
    assert_eq!(v["in_e"], false);
    assert_eq!(v["representation"]["members"], serde_json::json!([{"x": 0, "y": 0}, {"x": 2, "y": 1}]));

    let v = json(&fslattice(&["dyadic", "check", "--point", "8,3"]));
    assert_eq!(v["in_e"], true);
    assert_eq!(v["oracle_ran"], true);

    let v = json(&fslattice(&["dyadic", "empty-square", "--D", "3", "--verify"]));
    assert_eq!(v["x0"], serde_json::json!([4, 5, 6, 7]));
    assert_eq!(v["verified"], true);

    let v = json(&fslattice(&["dyadic", "dense-square", "--R", "3"]));
    assert_eq!(v["enumerated_count"], 21);

    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("e.pgm");
    let v = json(&fslattice(&["dyadic", "map", "--box", "1,1,32,32", "--out", map.to_str().unwrap()]));
    assert_eq!(v["outside_e_unreachable"], 0);
    assert!(std::fs::read_to_string(map).unwrap().starts_with("P2\n32 32\n"));
}

#[test]
fn gap_commands() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", &serde_json::to_string(&(1..=60).collect::<Vec<u64>>()).unwrap());
    let b = write(dir.path(), "b.json", "[1,2]");
    let v = json(&fslattice(&["gap", "build", "--A", &a, "--B", &b, "--L", "3,2"]));
    assert_eq!(v["differences"], serde_json::json!([[31, 3], [94, 3]]));
    assert_eq!(v["elements"].as_array().unwrap().len(), 6);

    let a40 = write(dir.path(), "a40.json", &serde_json::to_string(&(1..=40).collect::<Vec<u64>>()).unwrap());
    let b3 = write(dir.path(), "b3.json", "[1,2,3]");
    let v = json(&fslattice(&["gap", "rectangle", "--A", &a40, "--B", &b3, "--T", "3", "--H", "30"]));
    assert_eq!(v["q"], 6);
    assert!(v["measured"].as_u64() >= v["ledger_bound"].as_u64());

    let v = json(&fslattice(&["gap", "five-squares", "--lo", "1024", "--hi", "1100"]));
    assert_eq!(v["failures"], serde_json::json!([]));
    let out = fslattice(&["gap", "five-squares", "--lo", "50", "--hi", "60"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exit_codes() {
    assert_eq!(fslattice(&["nope"]).status.code(), Some(64));
    assert_eq!(fslattice(&["fs", "check", "--target", "1,1"]).status.code(), Some(64));
    assert_eq!(fslattice(&["--help"]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", "[[1,1]]");
    let capped = fslattice(&["--cap", "10", "fs", "check", "--generators", &g, "--target", "9,9"]);
    assert_eq!(capped.status.code(), Some(2));
    let env = Command::new(env!("CARGO_BIN_EXE_fslattice"))
        .args(["fs", "check", "--generators", &g, "--target", "9,9"])
        .env("FSLATTICE_CAP", "10")
        .output()
        .unwrap();
    assert_eq!(env.status.code(), Some(2));
    let bad = write(dir.path(), "bad.json", "[[0,0]]");
    assert_eq!(fslattice(&["fs", "check", "--generators", &bad, "--target", "1,1"]).status.code(), Some(1));
}

#[test]
fn config_file_sets_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.json", r#"{"seed": 5, "cone_max": 30}"#);
    let v = json(&fslattice(&["--config", &cfg, "selftest"]));
    assert_eq!(v["seed"], 5);
    assert_eq!(v["passed"], true);
    let bad = write(dir.path(), "bad.json", r#"{"sede": 5}"#);
    assert_eq!(fslattice(&["--config", &bad, "selftest"]).status.code(), Some(1));
}
