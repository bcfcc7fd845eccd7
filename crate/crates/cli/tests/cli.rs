use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tower-lab"))
        .args(args)
        .env_remove("TOWERLAB_PRECISION")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn classify_decreasing_pair() {
    let v = json(&["classify", "4", "3", "--depth", "6"]);
    assert_eq!(v["schema"], "tower-lab/1");
    assert_eq!(v["class"], "DecVerified");
    assert_eq!(v["thin"], false);
    assert_eq!(v["a"], "3");
}

#[test]
fn classify_failure_is_data() {
    let v = json(&["classify", "5", "4", "--depth", "1"]);
    assert_eq!(v["class"], "NotInOmegaAtDepth");
    assert_eq!(v["class_detail"]["reason"], "DegreeCollapse");
    assert!(v.get("thin").is_none());
}

#[test]
fn enumerate_small_omega1() {
    let v = json(&["enumerate", "omega1", "--max-nu", "3", "--depth", "6"]);
    let recs = v["records"].as_array().unwrap();
    assert_eq!(recs.len(), 2);
    assert_eq!(recs[0]["pair"]["nu"], "2");
    assert_eq!(recs[0]["pair"]["x0"], "1");
    assert_eq!(recs[1]["pair"]["nu"], "3");
    assert_eq!(recs[1]["pair"]["x0"], "2");
}

#[test]
fn lattice_dot_for_21() {
    let dir = std::env::temp_dir().join(format!("tower-lab-dot-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("out.dot");
    let v = json(&[
        "lattice",
        "2",
        "1",
        "--depth",
        "4",
        "--dot",
        path.to_str().unwrap(),
    ]);
    assert_eq!(v["lattice"]["nodes"].as_array().unwrap().len(), 11);
    assert_eq!(v["verification"]["all_passed"], true);
    let dot = std::fs::read_to_string(&path).unwrap();
    assert!(dot.starts_with("digraph lattice {"));
    assert_eq!(dot.matches("->").count(), 16);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn output_is_byte_identical() {
    for args in [
        &["lattice", "4", "3", "--depth", "3"][..],
        &["jr", "4", "3", "--depth", "5", "--census-t", "6"][..],
        &["enumerate", "sigma", "--max-nu", "5", "--depth", "4"][..],
    ] {
        let a = run(args);
        let b = run(args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn precondition_failures_exit_2() {
    for args in [
        &["classify", "4", "3", "--depth", "13"][..],
        &["sqrt2", "5", "4"][..],
        &["xset", "4", "3"][..],
        &["jr", "2", "0", "--depth", "3", "--precision", "300"][..],
        &["classify", "1", "0"][..],
        &["classify", "four", "3"][..],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn precision_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_tower-lab"))
        .args(["jr", "4", "3", "--depth", "2"])
        .env("TOWERLAB_PRECISION", "400")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_tower-lab"))
        .args(["jr", "4", "3", "--depth", "2"])
        .env("TOWERLAB_PRECISION", "12")
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn jr_csv_and_estimate() {
    let dir = std::env::temp_dir().join(format!("tower-lab-csv-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("houses.csv");
    let v = json(&[
        "jr",
        "4",
        "3",
        "--depth",
        "12",
        "--csv",
        path.to_str().unwrap(),
    ]);
    let upper: f64 = v["estimate"]["jr_upper"]["value"]
        .as_str()
        .unwrap()
        .parse()
        .unwrap();
    assert!((upper - 5.561_552_812_8).abs() < 1e-6);
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("n,house,gap\n"));
    assert_eq!(csv.lines().count(), 13);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn remaining_verbs_run() {
    let v = json(&["fermat", "12", "40"]);
    assert_eq!(v["discrepancies"].as_array().unwrap().len(), 1);
    assert_eq!(json(&["cyclo", "--max-n", "3"])["all_passed"], true);
    assert_eq!(json(&["sqrt2", "4", "3"])["in_k"], true);
    assert_eq!(
        json(&["xset", "20", "372", "--depth", "3"])["witness"]["param"]["d"],
        "1"
    );
    assert_eq!(
        json(&[
            "embed",
            "2",
            "0",
            "2",
            "1",
            "--source-depth",
            "3",
            "--depth",
            "4"
        ])["first_failure"],
        Value::Null
    );
    assert_eq!(
        json(&["scan", "klein", "2", "1", "--max-n", "2"])["steps"][0]["galois"],
        "V4"
    );
    assert_eq!(
        json(&["scan", "fn", "4", "3", "--count", "1"])["entries"][0]["f_n"],
        "1233"
    );
    let ec = json(&["scan", "ec", "2", "1", "--bound", "10"]);
    assert!(ec["scan"]["hits"]
        .as_array()
        .unwrap()
        .iter()
        .any(|h| h["x"] == 2));
}
