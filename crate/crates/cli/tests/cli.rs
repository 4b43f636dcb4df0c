use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qbcharge(args: &[&str], out_env: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qbcharge"));
    cmd.args(args).env_remove("QBCHARGE_OUT");
    if let Some(dir) = out_env {
        cmd.env("QBCHARGE_OUT", dir);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn simulate_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"scenario": "conventional"}"#);
    let out = dir.path().join("run");
    let o = qbcharge(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["trajectory.csv", "steady.csv", "meta.json"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("E_B = 11.138959"), "{stdout}");
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = qbcharge(&["figure", "--id", "figB"], Some(dir.path()));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("figB.csv").is_file());
    assert!(dir.path().join("figB.gp").is_file());
    assert!(dir.path().join("figB_meta.json").is_file());
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"scenario": "conventional", "kappa_a": -1}"#);
    let o = qbcharge(&["simulate", "--config", &cfg, "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("kappa_a"));
    let o = qbcharge(&["figure", "--id", "fig5"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(2));
    let o = qbcharge(&["simulate", "--config", "/nonexistent/config.json"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn undamped_scenario_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg =
        write_config(dir.path(), r#"{"scenario": "custom", "F": 0.1, "J_mag": 0.2, "horizon": 10, "samples": 11}"#);
    let o = qbcharge(&["simulate", "--config", &cfg, "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn optimize_modes_print_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"scenario": "conventional"}"#);
    let o = qbcharge(&["optimize", "--mode", "detuning", "--config", &cfg], None);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let closed = v["closed_form"]["delta_opt"].as_f64().unwrap();
    let numeric = v["numeric"]["delta_opt"].as_f64().unwrap();
    assert!((closed.abs() - 0.1991858).abs() < 1e-7);
    assert!((closed.abs() - numeric.abs()).abs() < 1e-8);

    let cfg = write_config(dir.path(), r#"{"scenario": "shared-replaced"}"#);
    let o = qbcharge(&["optimize", "--mode", "ratio", "--config", &cfg], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["y_opt"].as_f64().unwrap() - 5f64.sqrt()).abs() < 1e-12);
    assert!((v["energies"]["e_b"].as_f64().unwrap() - 18.927).abs() < 1e-3);
}

#[test]
fn verify_fast_passes_and_mutation_exits_4() {
    let o = qbcharge(&["verify", "--level", "fast"], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let o = qbcharge(&["verify", "--level", "fast", "--mutate", "gap-formula"], None);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("redistribution-gap"));
}
