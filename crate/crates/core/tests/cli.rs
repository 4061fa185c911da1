use std::path::Path;
use std::process::{Command, Output};

fn qeeg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qeeg")).args(args).output().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn help_and_usage_codes() {
    assert_eq!(qeeg(&["--help"]).status.code(), Some(0));
    let out = qeeg(&["nonsense"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(qeeg(&["train", "--features"]).status.code(), Some(1));
}

#[test]
fn invalid_band_names_the_band() {
    let dir = tempfile::tempdir().unwrap();
    let out = qeeg(&[
        "preprocess",
        "--input",
        p(&dir.path().join("none.csv")),
        "--out",
        p(&dir.path().join("f.csv")),
        "--low",
        "50",
        "--high",
        "40",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("[50, 40]"), "{err}");
}

#[test]
fn unknown_config_key_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "epochs = 3\nlearnin_rate = 0.1\n").unwrap();
    let out = qeeg(&["train", "--features", "x.csv", "--model", "m.json", "--config", p(&cfg)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("learnin_rate"));
}

#[test]
fn pipeline_is_deterministic_and_checks_class_counts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let run = |args: &[&str]| {
        let out = qeeg(args);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        out
    };
    run(&["synth", "--trials", "30", "--seed", "5", "--out", p(&d.join("raw"))]);
    let labels = std::fs::read_to_string(d.join("raw/labels.csv")).unwrap();
    assert_eq!(labels.lines().count(), 61);

    for name in ["a.csv", "b.csv"] {
        let out = run(&["preprocess", "--input", p(&d.join("raw/eeg.csv")), "--out", p(&d.join(name))]);
        assert!(!String::from_utf8_lossy(&out.stderr).contains("warning"), "synth output should load cleanly");
    }
    assert_eq!(std::fs::read(d.join("a.csv")).unwrap(), std::fs::read(d.join("b.csv")).unwrap());

    for (model, threads) in [("m1.json", "1"), ("m2.json", "1"), ("m3.json", "3")] {
        run(&[
            "train", "--features", p(&d.join("a.csv")), "--model", p(&d.join(model)), "--epochs", "3", "--seed", "4",
            "--threads", threads,
        ]);
    }
    let m1 = std::fs::read(d.join("m1.json")).unwrap();
    assert_eq!(m1, std::fs::read(d.join("m2.json")).unwrap());
    assert_eq!(m1, std::fs::read(d.join("m3.json")).unwrap());

    let out = run(&["eval", "--model", p(&d.join("m1.json")), "--features", p(&d.join("a.csv"))]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("accuracy:"));
    let out = run(&["eval", "--model", p(&d.join("m1.json")), "--features", p(&d.join("a.csv")), "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["n_samples"], 60);

    run(&["roc", "--model", p(&d.join("m1.json")), "--features", p(&d.join("a.csv")), "--out", p(&d.join("roc.csv"))]);
    let roc = std::fs::read_to_string(d.join("roc.csv")).unwrap();
    assert!(roc.starts_with("fpr,tpr,threshold\n0"));

    // A 3-class feature file against the 2-class model.
    let mut three = std::fs::read_to_string(d.join("a.csv")).unwrap();
    three.push_str("1.0,1.0,1.0,1.0,2\n");
    std::fs::write(d.join("three.csv"), three).unwrap();
    let out = qeeg(&["eval", "--model", p(&d.join("m1.json")), "--features", p(&d.join("three.csv"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("shape"));

    let out = qeeg(&["train", "--features", p(&d.join("three.csv")), "--model", p(&d.join("x.json"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn three_class_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let ok = |args: &[&str]| assert_eq!(qeeg(args).status.code(), Some(0), "{args:?}");
    ok(&["synth", "--trials", "20", "--classes", "3", "--out", p(d)]);
    ok(&["preprocess", "--input", p(&d.join("eeg.csv")), "--out", p(&d.join("f.csv")), "--method", "fft"]);
    ok(&["train", "--features", p(&d.join("f.csv")), "--model", p(&d.join("m.json")), "--classes", "3", "--epochs", "2"]);
    let out = qeeg(&["eval", "--model", p(&d.join("m.json")), "--features", p(&d.join("f.csv"))]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("Macro"));
    // ROC export is binary only.
    assert_eq!(qeeg(&["roc", "--model", p(&d.join("m.json")), "--features", p(&d.join("f.csv"))]).status.code(), Some(2));
}

#[test]
fn dump_circuit_writes_gate_list() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut csv = String::from("delta,theta,alpha,beta,label\n");
    for i in 0..40 {
        let j = (i % 5) as f64 * 0.1;
        csv.push_str(&if i % 2 == 0 { format!("1,1,{},1,0\n", 4.0 + j) } else { format!("1,1,1,{},1\n", 4.0 + j) });
    }
    std::fs::write(d.join("f.csv"), csv).unwrap();
    let out = qeeg(&[
        "train", "--features", p(&d.join("f.csv")), "--model", p(&d.join("m.json")), "--epochs", "1",
        "--depth", "2", "--entanglement", "ring", "--dump-circuit", p(&d.join("c.txt")),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(d.join("c.txt")).unwrap();
    assert_eq!(text.lines().count(), 2 * (8 + 4));
    assert!(text.lines().next().unwrap().starts_with("RX q0 "));
    assert!(text.contains("CNOT q3 q0"));
}
