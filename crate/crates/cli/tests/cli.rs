use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sqzq(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqzq")).args(args).current_dir(dir).output().expect("binary runs")
}

fn run_ok(args: &[&str], dir: &Path) {
    let o = sqzq(args, dir);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_values(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn fig6_presets_classify() {
    let d = tempfile::tempdir().unwrap();
    for (name, want) in [("fig6a", "bounded"), ("fig6c", "escaped")] {
        run_ok(&["simulate", "--preset", name, "--out", name], d.path());
        let s = json(&d.path().join(name).join("summary.json"));
        assert_eq!(s["classification"], want);
        assert!(s["energy_drift"].as_f64().unwrap() < 1e-6);
        let text = fs::read_to_string(d.path().join(name).join("trajectory.csv")).unwrap();
        assert!(text.starts_with("t,q1,q2,p1,p2,E\n"));
    }
}

#[test]
fn fig3c_closes() {
    let d = tempfile::tempdir().unwrap();
    run_ok(&["simulate", "--preset", "fig3c", "--out", "o"], d.path());
    let s = json(&d.path().join("o/summary.json"));
    assert!(s["recurrence_residual"].as_f64().unwrap() < 1e-3);
}

#[test]
fn output_is_reproducible_across_thread_counts() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("p.json"), r#"{"quantity": "veff"}"#).unwrap();
    run_ok(&["simulate", "--preset", "fig4b", "--out", "a"], d.path());
    run_ok(&["simulate", "--preset", "fig4b", "--out", "b"], d.path());
    let o = Command::new(env!("CARGO_BIN_EXE_sqzq"))
        .args(["portrait", "--preset", "fig5", "--config", "p.json", "--out", "c"])
        .env("SQZQ_THREADS", "1")
        .current_dir(d.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    run_ok(&["portrait", "--preset", "fig5", "--config", "p.json", "--out", "e"], d.path());
    for f in ["trajectory.csv", "summary.json"] {
        assert_eq!(fs::read(d.path().join("a").join(f)).unwrap(), fs::read(d.path().join("b").join(f)).unwrap());
    }
    let veff = "portrait_veff.csv";
    assert_eq!(fs::read(d.path().join("c").join(veff)).unwrap(), fs::read(d.path().join("e").join(veff)).unwrap());
}

#[test]
fn portrait_chi_at_tau_zero_is_smoothed_box() {
    let d = tempfile::tempdir().unwrap();
    let cfg = r#"{"quantity": "chi", "model": {"m0": 1, "lambda": [1, 2]}, "state": {"lambda": [0.3, 0.3]},
                  "grid": {"q1": {"lo": -2, "hi": 2, "n": 21}, "q2": {"lo": 0, "hi": 0, "n": 1}}}"#;
    fs::write(d.path().join("c.json"), cfg).unwrap();
    run_ok(&["portrait", "--config", "c.json", "--out", "o"], d.path());
    let rows = csv_values(&d.path().join("o/portrait_chi.csv"));
    assert_eq!(rows.len(), 21);
    for r in &rows {
        // walls at q1 = ±1 and q2 = ±0.5, kernel width 0.3
        let s = 0.3 * std::f64::consts::SQRT_2;
        let along = |q: f64, w: f64| 0.5 * (erf_simpson((q + w) / s) - erf_simpson((q - w) / s));
        let want = along(r[0], 1.0) * along(r[1], 0.5);
        assert!((r[2] - want).abs() < 1e-12, "{r:?} vs {want}");
    }
}

fn erf_simpson(x: f64) -> f64 {
    let n = 4000;
    let h = x / n as f64;
    let f = |t: f64| (-t * t).exp();
    let mut s = f(0.0) + f(x);
    for i in 1..n {
        s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0 * 2.0 / std::f64::consts::PI.sqrt()
}

#[test]
fn nonsep_portrait_reduces_to_separable() {
    let d = tempfile::tempdir().unwrap();
    let cfg = r#"{"quantity": "QTY", "state": {"tau": [[0.4, 0], [-0.3, 0]], "lambda": [0.8, 1.1], "hbar": 0.9, "phi": 0},
                  "field": {"lo": [-0.5, -1], "hi": [0.7, 0.4]}, "p": [0.3, -0.2],
                  "grid": {"q1": {"lo": -1, "hi": 1, "n": 9}, "q2": {"lo": -1, "hi": 1, "n": 7}}}"#;
    fs::write(d.path().join("n.json"), cfg.replace("QTY", "nonsep_hq")).unwrap();
    fs::write(d.path().join("s.json"), cfg.replace("QTY", "sep_hq")).unwrap();
    run_ok(&["portrait", "--config", "n.json", "--out", "o"], d.path());
    run_ok(&["portrait", "--config", "s.json", "--out", "o"], d.path());
    let a = csv_values(&d.path().join("o/portrait_nonsep_hq.csv"));
    let b = csv_values(&d.path().join("o/portrait_sep_hq.csv"));
    assert_eq!(a.len(), 63);
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x[..2], y[..2]);
        assert!((x[2] - y[2]).abs() < 1e-10);
    }
}

#[test]
fn verify_reports_delta_and_linear_rows() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("v.json"), r#"{"suites": ["identity", "nonsep", "linear_rows"], "draws": 3}"#).unwrap();
    run_ok(&["verify", "--config", "v.json", "--out", "o"], d.path());
    let r = json(&d.path().join("o/verify.json"));
    let errata = r["errata"].as_array().unwrap();
    let delta = errata.iter().find(|e| e["item"] == "delta_factored_form").unwrap();
    assert!((delta["printed_deviation"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    let checks = r["checks"].as_array().unwrap();
    let id = checks.iter().find(|c| c["name"] == "one_mode_identity_tau_0").unwrap();
    assert!(id["max_deviation"].as_f64().unwrap() < 1e-6);
    assert!(checks.iter().any(|c| c["name"] == "linear_row_q1_physical_derived" && c["passed"] == true));
}

#[test]
fn quantise_q_gives_position_operator() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("q.json"), r#"{"function": "q", "family": {"one_mode": {"tau": [0.5, 0], "lambda": 2}}}"#).unwrap();
    run_ok(&["quantise", "--config", "q.json", "--fock-dim", "5", "--out", "o"], d.path());
    let rows = csv_values(&d.path().join("o/operator.csv"));
    assert_eq!(rows.len(), 25);
    for r in rows {
        let (n, m) = (r[0] as usize, r[1] as usize);
        let want = if m == n + 1 { 2.0 * (m as f64 / 2.0).sqrt() } else if n == m + 1 { 2.0 * (n as f64 / 2.0).sqrt() } else { 0.0 };
        assert!((r[2] - want).abs() < 1e-9 && r[3].abs() < 1e-9);
    }
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    fs::write(d.path().join("bad.json"), r#"{"quantity": "veff",
  "model": {"m0": 1, "lambda": [1, 1], "extra": 2}}"#)
    .unwrap();
    let o = sqzq(&["portrait", "--config", "bad.json"], d.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert_eq!(sqzq(&["simulate", "--preset", "fig9z"], d.path()).status.code(), Some(2));
    assert_eq!(sqzq(&["simulate"], d.path()).status.code(), Some(2));

    // canonical form reaches the singular wall: partial output, exit 3
    let cfg = r#"{"dynamics": "classical", "model": {"m0": 1, "lambda": [1, 1]}, "q0": [0, 0], "v0": [1, 0.2],
                  "t_end": 5, "form": "canonical"}"#;
    fs::write(d.path().join("s.json"), cfg).unwrap();
    let o = sqzq(&["simulate", "--config", "s.json", "--out", "o"], d.path());
    assert_eq!(o.status.code(), Some(3));
    let s = json(&d.path().join("o/summary.json"));
    assert_eq!(s["classification"], "singular-stop");
    assert!(s["final"]["t"].as_f64().unwrap() < 5.0);
    assert!(d.path().join("o/trajectory.csv").exists());
}
