use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn susy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_susy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json_file(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn epsilons(report: &Value) -> Vec<f64> {
    report["eigenvalues"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["epsilon"].as_f64().unwrap())
        .collect()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect()
}

#[test]
fn coulomb_spectrum_on_stdout() {
    let out = susy(&["spectrum", "--system", "coulomb", "--ell", "1", "--m", "1"]);
    assert_eq!(code(&out), 0);
    let rep: Value = serde_json::from_slice(&out.stdout).unwrap();
    let eps = epsilons(&rep);
    assert_eq!(eps.len(), 4);
    for (n, e) in eps.iter().enumerate() {
        assert!((e - (1.0 - 1.0 / ((n + 2) * (n + 2)) as f64)).abs() < 1e-6);
    }
}

#[test]
fn oscillator_and_trig_dirac_energies() {
    let out = susy(&[
        "spectrum",
        "--system",
        "oscillator",
        "--A",
        "-5",
        "--m",
        "1",
    ]);
    assert_eq!(code(&out), 0);
    let rep: Value = serde_json::from_slice(&out.stdout).unwrap();
    for (n, pair) in rep["dirac_energies"].as_array().unwrap().iter().enumerate() {
        let p = floats(pair);
        let e = (2.0 * n as f64 + 7.0).sqrt();
        assert!((p[0] - e).abs() < 1e-6 && (p[1] + e).abs() < 1e-6);
    }

    let out = susy(&["spectrum", "--system", "trig", "--m", "1"]);
    let rep: Value = serde_json::from_slice(&out.stdout).unwrap();
    let e: Vec<f64> = rep["dirac_energies"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| floats(p)[0])
        .collect();
    for (got, want) in e.iter().zip([26.0_f64, 50.0, 82.0]) {
        assert!((got - want.sqrt()).abs() < 1e-6);
    }
}

#[test]
fn coulomb_deletion_writes_curves_and_report() {
    let dir = TempDir::new().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = susy(&[
        "transform",
        "--system",
        "coulomb",
        "--n0",
        "2",
        "--outputs",
        "q0,q1,U1,wronskian,spinors,report",
        "--out",
        d,
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for f in [
        "q0.csv",
        "q1.csv",
        "U1.csv",
        "wronskian.csv",
        "spinors.csv",
        "report.json",
    ] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let q1 = std::fs::read_to_string(dir.path().join("q1.csv")).unwrap();
    let mut lines = q1.lines();
    assert_eq!(lines.next(), Some("x,value"));
    let row = lines.next().unwrap();
    let mantissa = row.split(',').nth(1).unwrap().split('e').next().unwrap();
    assert!(mantissa.chars().filter(|c| c.is_ascii_digit()).count() >= 12);

    let rep = json_file(&dir.path().join("report.json"));
    assert_eq!(rep["regularity"]["regular"], Value::Bool(true));
    let deleted = floats(&rep["spectrum_diff"]["deleted"]);
    assert_eq!(deleted.len(), 1);
    assert!((deleted[0] - (1.0 - 1.0 / 16.0)).abs() < 1e-6);
    assert!(rep["spectrum_diff"]["inserted"]
        .as_array()
        .unwrap()
        .is_empty());
    // q1 diverges faster than q0 at the origin
    let first = |name: &str| -> f64 {
        let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
        text.lines()
            .nth(1)
            .unwrap()
            .split(',')
            .nth(1)
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!(first("q1.csv").abs() > first("q0.csv").abs());
}

#[test]
fn oscillator_insertion_deforms_the_potential() {
    let dir = TempDir::new().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = susy(&[
        "transform",
        "--system",
        "oscillator",
        "--lambda",
        "9.1",
        "--B",
        "-0.01",
        "--outputs",
        "U0,U1,report",
        "--out",
        d,
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let read = |name: &str| -> Vec<f64> {
        let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
        text.lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
            .collect()
    };
    let (u0, u1) = (read("U0.csv"), read("U1.csv"));
    let n = u0.len();
    assert!((u1[n / 2] - u0[n / 2]).abs() > 0.1);
    // u0 decays on the left, so U1 → U0 there; on the right u0 grows like
    // exp(x²/2) and −2 (log W)'' tends to −4
    assert!((u1[0] - u0[0]).abs() < 1e-3);
    assert!((u1[n - 1] - u0[n - 1] + 4.0).abs() < 0.5);
    let rep = json_file(&dir.path().join("report.json"));
    let inserted = floats(&rep["spectrum_diff"]["inserted"]);
    assert_eq!(inserted.len(), 1);
    assert!((inserted[0] - 9.1).abs() < 1e-5);
}

#[test]
fn default_verify_passes_and_reports_residuals() {
    let dir = TempDir::new().unwrap();
    let out = susy(&["verify", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let rep = json_file(&dir.path().join("report.json"));
    assert_eq!(rep["passed"], Value::Bool(true));
    let checks = rep["checks"].as_array().unwrap();
    assert!(checks.len() >= 10);
    assert!(checks
        .iter()
        .all(|c| c["measured"].is_number() && c["threshold"].is_number()));
}

#[test]
fn inadmissible_w0_fails_regularity() {
    let dir = TempDir::new().unwrap();
    // W = w0 − ∫_0^x u0² with ∫ u0² = 24 crosses zero inside the domain
    let out = susy(&[
        "verify",
        "--w0",
        "12",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3);
    let rep = json_file(&dir.path().join("report.json"));
    assert_eq!(rep["regular"], Value::Bool(false));

    let out = susy(&[
        "transform",
        "--w0",
        "12",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3);
    let rep = json_file(&dir.path().join("report.json"));
    assert_eq!(
        rep["regularity"]["interior_wronskian_zeros"]
            .as_array()
            .unwrap()
            .len(),
        1
    );
    assert!(!dir.path().join("U1.csv").exists());

    let out = susy(&[
        "transform",
        "--w0",
        "12",
        "--allow-singular",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(dir.path().join("U1.csv").exists());
}

#[test]
fn tightened_tolerance_on_a_coarse_grid_fails() {
    let dir = TempDir::new().unwrap();
    let d = dir.path().to_str().unwrap();
    let coarse = [
        "verify",
        "--system",
        "oscillator",
        "--grid-points",
        "801",
        "--out",
        d,
    ];
    assert_eq!(code(&susy(&coarse)), 0);
    let mut tight = coarse.to_vec();
    tight.extend(["--tolerance", "0.01"]);
    assert_eq!(code(&susy(&tight)), 4);
    let rep = json_file(&dir.path().join("report.json"));
    assert_eq!(rep["passed"], Value::Bool(false));
}

#[test]
fn config_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"system": {"name": "coulomb", "ell": 1}, "unknown": 3}"#,
    )
    .unwrap();
    assert_eq!(
        code(&susy(&["spectrum", "--config", bad.to_str().unwrap()])),
        2
    );
    assert_eq!(
        code(&susy(&["spectrum", "--config", "/nonexistent/config.json"])),
        2
    );
    assert_eq!(code(&susy(&["verify", "--tau-ode", "-1"])), 2);
    assert_eq!(
        code(&susy(&["transform", "--system", "trig", "--order", "2"])),
        2
    );
}

#[test]
fn config_file_with_flag_override() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"system": {"name": "coulomb", "ell": 2}, "m": 2.0, "levels": 2}"#,
    )
    .unwrap();
    let out = susy(&["spectrum", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let eps = epsilons(&serde_json::from_slice(&out.stdout).unwrap());
    assert_eq!(eps.len(), 2);
    assert!((eps[0] - (0.25 - 1.0 / 9.0)).abs() < 1e-6);

    let out = susy(&["spectrum", "--config", cfg.to_str().unwrap(), "--ell", "1"]);
    let eps = epsilons(&serde_json::from_slice(&out.stdout).unwrap());
    assert!((eps[0] - 0.75).abs() < 1e-6);
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let d = dir.path().to_str().unwrap();
    let run = || {
        assert_eq!(
            code(&susy(&["transform", "--system", "trig", "--out", d])),
            0
        );
        ["report.json", "spinors.csv", "q1.csv"].map(|f| std::fs::read(dir.path().join(f)).unwrap())
    };
    assert_eq!(run(), run());
}
