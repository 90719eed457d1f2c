use std::path::PathBuf;
use std::process::{Command, Output};

fn write_config(name: &str, json: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fockdyn-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, json).unwrap();
    path
}

fn fockdyn(args: &[&str], config: &PathBuf) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fockdyn"))
        .args(args)
        .arg("--config")
        .arg(config)
        .env("FOCKDYN_THREADS", "0")
        .output()
        .unwrap()
}

#[test]
fn classify_identity() {
    let cfg = write_config("identity.json", r#"{"params": {"a": [1, 0], "u0": [1, 0]}}"#);
    let out = fockdyn(&["classify"], &cfg);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["ritt"]["value"], "Yes");
    assert_eq!(v["spectrum"]["kind"], "Singleton");
}

#[test]
fn malformed_json_exits_two() {
    let cfg = write_config("broken.json", r#"{"params": {"a": [1, 0], "u0": "#);
    let out = fockdyn(&["classify"], &cfg);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn missing_config_exits_two() {
    let out = fockdyn(&["classify"], &PathBuf::from("/nonexistent/fockdyn.json"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn zero_weight_exits_three() {
    let cfg = write_config("zero.json", r#"{"params": {"a": [0.5, 0], "u0": [0, 0]}}"#);
    assert_eq!(fockdyn(&["classify"], &cfg).status.code(), Some(3));
}

#[test]
fn unbounded_verify_exits_four() {
    let cfg = write_config("unbounded.json", r#"{"params": {"a": [1, 0], "b": [1, 0], "u0": [1, 0]}}"#);
    let out = fockdyn(&["verify"], &cfg);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("spectrum undefined"));
}

#[test]
fn matrix_to_file_with_overrides() {
    let cfg = write_config("diag.json", r#"{"params": {"a": [0.5, 0], "u0": [1, 0]}}"#);
    let target = cfg.with_file_name("diag.csv");
    let out = fockdyn(&["matrix", "--n-dim", "3", "--out", target.to_str().unwrap()], &cfg);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(&target).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "1+0j,0+0j,0+0j");
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn scan_identity() {
    let cfg = write_config(
        "scan.json",
        r#"{"params": {"a": [1, 0], "u0": [1, 0]}, "n_dim": 6, "grid": {"rho_values": [0.5], "theta_values": [0, 1]}}"#,
    );
    let out = fockdyn(&["scan"], &cfg);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "lambda_re,lambda_im,functional,n_dim");
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn probe_with_seed_override_is_deterministic() {
    let cfg = write_config("probe.json", r#"{"params": {"a": [0.5, 0], "u0": [1, 0]}, "n_dim": 16, "n_max": 10}"#);
    let a = fockdyn(&["probe", "--seed", "7"], &cfg);
    let b = fockdyn(&["probe", "--seed", "7"], &cfg);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("min_projective_distance,ratio_max,ratio_bound_C,n_max,targets_tested\n"));
}

#[test]
fn verify_small_yes_case() {
    let cfg = write_config(
        "verify.json",
        r#"{"params": {"a": [0.5, 0], "u0": [0.9, 0]}, "n_dim": 32, "n_max": 20,
            "grid": {"rho_values": [0.001, 0.1, 1], "theta_values": [-1.5, 0, 1.5, 3.14159]}}"#,
    );
    let out = fockdyn(&["verify"], &cfg);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["ritt_scan"]["stable"], true);
    assert_eq!(v["pass"], true);
}

#[test]
fn bad_thread_env_exits_two() {
    let cfg = write_config("threads.json", r#"{"params": {"a": [1, 0], "u0": [1, 0]}}"#);
    let out = Command::new(env!("CARGO_BIN_EXE_fockdyn"))
        .args(["classify", "--config"])
        .arg(&cfg)
        .env("FOCKDYN_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
