use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn strebel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strebel"))
        .args(args)
        .env_remove("STREBEL_LOG")
        .output()
        .expect("binary runs")
}

fn run_ok(args: &[&str]) -> String {
    let out = strebel(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Column `name` of a CSV table, parsed as floats.
fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let idx = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

fn f(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

#[test]
fn validate_exit_codes() {
    let ok = strebel(&["validate", &f("torus.json")]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).starts_with("valid\n"));

    let bad = strebel(&["validate", &f("torus_mismatch.json")]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stdout).contains("interval_length_mismatch"));

    assert_eq!(strebel(&["validate", &f("no_such_file.json")]).status.code(), Some(2));
}

#[test]
fn malformed_json_is_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("broken.json");
    std::fs::write(&p, "{ \"genus\": 1,").unwrap();
    for cmd in ["validate", "distance", "shift", "qc-sweep", "oracle"] {
        assert_eq!(strebel(&[cmd, p.to_str().unwrap()]).status.code(), Some(2), "{cmd}");
    }
}

#[test]
fn bad_grid_is_exit_two() {
    assert_eq!(strebel(&["distance", &f("pair.json"), "--t", "1:0:1"]).status.code(), Some(2));
}

#[test]
fn negative_t_is_a_domain_error() {
    assert_eq!(strebel(&["distance", &f("pair.json"), "--t", "-1,2"]).status.code(), Some(1));
}

#[test]
fn distance_example_pair() {
    let csv = run_ok(&["distance", &f("pair.json")]);
    assert!(csv.starts_with("t,lower_bound,K_F_t_upper,theorem_value\n"));
    let theorem = column(&csv, "theorem_value");
    assert_eq!(theorem.len(), 10);
    assert!(theorem.iter().all(|&v| (v - 0.346574).abs() < 5e-7));
    assert_eq!(column(&csv, "lower_bound"), theorem);
    // upper bound sits above the limit wherever it exists
    let upper = column(&csv, "K_F_t_upper");
    for (u, th) in upper.iter().zip(&theorem).filter(|(u, _)| u.is_finite()) {
        assert!(u >= th && u - th < 0.02);
    }
}

#[test]
fn distance_identical_rays_all_zero() {
    let csv = run_ok(&["distance", &f("pair_identical.json"), "--t", "1:5:1"]);
    for col in ["lower_bound", "K_F_t_upper", "theorem_value"] {
        assert!(column(&csv, col).iter().all(|&v| v == 0.0), "{col}");
    }
}

#[test]
fn distance_divergent() {
    let csv = run_ok(&["distance", &f("pair_divergent.json")]);
    assert_eq!(csv, "t,lower_bound,K_F_t_upper,theorem_value\ndivergent\n");
}

#[test]
fn shift_minimum() {
    let out = strebel(&["shift", &f("pair.json")]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    let alpha = column(&csv, "alpha");
    let value = column(&csv, "shifted_value");
    assert_eq!(alpha.len(), 1001);
    let (i, min) = value.iter().enumerate().fold((0, f64::INFINITY), |b, (i, &v)| if v < b.1 { (i, v) } else { b });
    assert!((min - 0.25 * 2f64.ln()).abs() < 1e-9);
    assert!((alpha[i] + 0.1733).abs() < 1e-4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha* = -0.17328679514"));
}

#[test]
fn shift_single_cylinder() {
    let csv = run_ok(&["shift", &f("pair_single.json"), "--alpha", "-0.69314718055994530942,0"]);
    let v = column(&csv, "shifted_value");
    assert!(v[0].abs() < 1e-12);
    assert!((v[1] - 2f64.ln()).abs() < 1e-9);
}

#[test]
fn qc_sweep_p_fixture_constant_three() {
    let csv = run_ok(&["qc-sweep", &f("params_p.json")]);
    let kp = column(&csv, "K_P");
    assert_eq!(kp.len(), 10);
    assert!(kp.iter().all(|&k| (k - 3.0).abs() < 1e-9));
}

#[test]
fn qc_sweep_identity_all_ones() {
    let csv = run_ok(&["qc-sweep", &f("params_identity.json"), "--t", "0:4:1"]);
    for col in ["K_P", "K_Q_sup", "K_h", "K_F"] {
        assert!(column(&csv, col).iter().all(|&v| v == 1.0), "{col}");
    }
}

#[test]
fn qc_sweep_node_tends_to_one() {
    let csv = run_ok(&["qc-sweep", &f("params_node.json")]);
    let k = column(&csv, "K_H");
    assert!(k.windows(2).all(|w| w[1] < w[0]));
    assert!(*k.last().unwrap() < 1.02);
}

#[test]
fn oracle_json() {
    let out = run_ok(&["oracle", &f("domain_quad.json"), "--resolution", "64"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["value"].as_f64().unwrap() - 2.0).abs() < 0.01);
    assert_eq!(v["resolution"], 64);
    assert!(v["err_est"].is_number());

    let out = run_ok(&["oracle", &f("domain_annulus.json")]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["value"].as_f64().unwrap() - 0.5).abs() < 0.01);
    assert_eq!(v["flagged"], false);
}

#[test]
fn out_flag_and_byte_identical_output() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        run_ok(&["distance", &f("pair.json"), "--seed", "7", "--out", p.to_str().unwrap()]);
    }
    let x = std::fs::read(&a).unwrap();
    assert!(!x.is_empty());
    assert_eq!(x, std::fs::read(&b).unwrap());
    let stdout = run_ok(&["distance", &f("pair.json"), "--seed", "7"]);
    assert_eq!(stdout.as_bytes(), &x[..]);
}

#[test]
fn json_format_rows() {
    let out = run_ok(&["qc-sweep", &f("params_p.json"), "--t", "2,3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert_eq!(v[1]["t"], 3.0);
}
