use std::process::{Command, Output};

use serde_json::Value;

fn fivequdit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fivequdit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn encode_prints_the_qubit_codeword() {
    let out = fivequdit(&["encode", "--n", "2", "--k", "0", "--no-timestamp"]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["n"], 2);
    assert_eq!(doc["k"], 0);
    let amps = doc["amps"].as_array().unwrap();
    assert_eq!(amps.len(), 32);
    let s = 8f64.sqrt().recip();
    // |00000>, |01100>, |10110> (negative), |00011> (negative)
    for (index, sign) in [
        (0b00000, 1.0),
        (0b01100, 1.0),
        (0b10110, -1.0),
        (0b00011, -1.0),
    ] {
        let re = amps[index][0].as_f64().unwrap();
        let im = amps[index][1].as_f64().unwrap();
        assert!(
            (re - sign * s).abs() < 1e-12 && im.abs() < 1e-12,
            "index {index}"
        );
    }
    let support = amps
        .iter()
        .filter(|a| a[0].as_f64().unwrap().abs() + a[1].as_f64().unwrap().abs() > 1e-12)
        .count();
    assert_eq!(support, 8);
}

#[test]
fn simulate_reports_every_trial() {
    let out = fivequdit(&[
        "simulate",
        "--n",
        "3",
        "--trials",
        "100",
        "--seed",
        "7",
        "--no-timestamp",
    ]);
    assert!(out.status.success());
    let lines: Vec<Value> = stdout(&out)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 101);
    for record in &lines[..100] {
        assert!(
            record["fidelity"].as_f64().unwrap() >= 1.0 - 1e-9,
            "{record}"
        );
        assert!(record["register"].as_u64().unwrap() >= 1);
    }
    let summary = &lines[100];
    assert_eq!(summary["summary"], true);
    assert_eq!(summary["failures"], 0);
    assert_eq!(summary["corrected_dimension"], 123);
}

#[test]
fn reports_are_byte_identical_without_timestamps() {
    for args in [
        &["verify", "--n", "3", "--no-timestamp"][..],
        &[
            "simulate",
            "--n",
            "2",
            "--trials",
            "20",
            "--seed",
            "3",
            "--no-timestamp",
        ][..],
        &["optimality", "--n", "2", "--trials", "20", "--no-timestamp"][..],
    ] {
        let a = fivequdit(args);
        let b = fivequdit(args);
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn verify_and_circuit_check_pass() {
    for n in ["2", "3", "4", "5"] {
        let out = fivequdit(&["verify", "--n", n, "--no-timestamp"]);
        assert!(out.status.success(), "verify n = {n}");
        let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert_eq!(doc["verdict"], "pass");
        assert!(doc.get("elapsed_seconds").is_none());

        let out = fivequdit(&["circuit-check", "--n", n]);
        assert!(out.status.success(), "circuit-check n = {n}");
        let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert_eq!(doc["gate_count"], 12);
        assert!(doc["max_residual"].as_f64().unwrap() < 1e-9);
    }
}

#[test]
fn timestamps_are_added_by_default() {
    let out = fivequdit(&["verify", "--n", "2"]);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(doc["elapsed_seconds"].as_f64().is_some());
    assert!(doc.get("timestamp").is_some());
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["verify", "--n", "1"][..],
        &["verify", "--n", "9"][..],
        &["verify", "--n", "6"][..],
        &["encode", "--n", "3", "--k", "3"][..],
        &["verify", "--tol", "0.5"][..],
        &["simulate", "--trials", "0"][..],
        &["frobnicate"][..],
    ] {
        let out = fivequdit(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn large_n_needs_the_flag_and_warns() {
    let out = fivequdit(&[
        "encode",
        "--n",
        "6",
        "--k",
        "5",
        "--allow-large-n",
        "--no-timestamp",
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn text_format_and_out_file() {
    let dir = std::env::temp_dir().join(format!("fivequdit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("verify.txt");
    let out = fivequdit(&[
        "verify",
        "--n",
        "2",
        "--format",
        "text",
        "--no-timestamp",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("verdict: pass"));
    assert!(text.contains("error_count: 16"));
    std::fs::remove_dir_all(&dir).unwrap();
}
