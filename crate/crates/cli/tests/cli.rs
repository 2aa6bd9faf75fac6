//! End-to-end checks of the command-line interface.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dmabeam"))
}

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf()
}

fn tiny_config(dir: &Path, seed: u64) -> PathBuf {
    let path = dir.join("config.json");
    let text = format!(
        r#"{{
  "base": {{
    "frequency_hz": 1e10, "antenna_length_m": 0.03, "num_users": 1,
    "rf_thresholds_w": [1e-5], "realizations": 2, "rng_seed": {seed}
  }},
  "sweep_variable": "frequency",
  "sweep_values": [1e10, 1.2e10],
  "methods": ["FD", "MRT_BOUND"],
  "output_dir": "{}"
}}"#,
        dir.join("out").display()
    );
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn materials_list_shows_the_builtin_table() {
    let out = bin().args(["materials", "list"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("Cylex FR4"));
    assert!(text.contains("DuPont Pyralux AP-9161"));
    assert!(text.contains("Taconic RF-10"));
}

#[test]
fn validate_accepts_presets_and_rejects_garbage() {
    let preset = repo_root().join("presets/fig3-style.json");
    let out = bin().args(["validate"]).arg(&preset).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("configuration ok"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"methods\": []}").unwrap();
    let out = bin().args(["validate"]).arg(&bad).output().unwrap();
    assert!(!out.status.success());

    let out = bin().args(["validate", "no-such-file.json"]).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn run_writes_outputs_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = tiny_config(dir.path(), 11);

    let out_a = dir.path().join("a");
    let out = bin().args(["run"]).arg(&config).arg("--out").arg(&out_a).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for file in ["records.csv", "summary.csv", "timings.csv", "manifest.json"] {
        assert!(out_a.join(file).exists(), "{file} missing");
    }

    let out_b = dir.path().join("b");
    let out = bin().args(["run"]).arg(&config).arg("--out").arg(&out_b).output().unwrap();
    assert!(out.status.success());
    assert_eq!(
        std::fs::read(out_a.join("records.csv")).unwrap(),
        std::fs::read(out_b.join("records.csv")).unwrap()
    );

    // a different seed changes the records
    let out_c = dir.path().join("c");
    let out = bin()
        .args(["run"])
        .arg(&config)
        .arg("--out")
        .arg(&out_c)
        .args(["--seed", "99"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_ne!(
        std::fs::read(out_a.join("records.csv")).unwrap(),
        std::fs::read(out_c.join("records.csv")).unwrap()
    );
}

#[test]
fn run_accepts_method_and_sweep_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config = tiny_config(dir.path(), 5);
    let out_dir = dir.path().join("o");
    let out = bin()
        .args(["run"])
        .arg(&config)
        .arg("--out")
        .arg(&out_dir)
        .args(["--methods", "FD", "--sweep", "antenna_length=0.03,0.04", "--realizations", "1"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let records = std::fs::read_to_string(out_dir.join("records.csv")).unwrap();
    // 2 sweep points x 1 realization x 1 method + header
    assert_eq!(records.lines().count(), 3);
    assert!(records.contains("0.04"));
    assert!(!records.contains("MRT_BOUND"));

    let out = bin()
        .args(["run"])
        .arg(&config)
        .args(["--methods", "WARP_DRIVE"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}
