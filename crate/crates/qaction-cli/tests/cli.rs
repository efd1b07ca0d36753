//! End-to-end checks of the command-line surface.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qaction"))
}

#[test]
fn list_names_all_experiments() {
    let out = bin().arg("--list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for name in [
        "fig1-potential-wave",
        "fig2-fit-vs-T",
        "boundary-study",
        "resolution-study",
        "asymptotic-check",
        "fig3-chaos-scan",
    ] {
        assert!(text.contains(name), "--list output missing {name}:\n{text}");
    }
}

#[test]
fn verify_passes_on_a_fresh_build() {
    let out = bin().arg("--verify").output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "verify failed:\n{text}");
    assert!(text.contains("all checks passed"));
}

#[test]
fn unknown_experiment_exits_nonzero_with_message() {
    let out = bin().args(["--experiment", "no-such-thing"]).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("no-such-thing"), "stderr: {err}");
}

#[test]
fn invalid_config_field_is_named_and_nothing_is_written() {
    let dir = std::env::temp_dir().join(format!("qaction-cli-invalid-{}", std::process::id()));
    let cfg = dir.join("bad.conf");
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(&cfg, "classical.v2 = not-a-number\n").unwrap();
    let out_dir = dir.join("out");
    let out = bin()
        .args(["--experiment", "fig1-potential-wave", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("classical.v2"), "stderr should name the field: {err}");
    assert!(!out_dir.join("potential_wave.csv").exists());
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn fig1_runs_end_to_end_with_artifacts() {
    let dir = std::env::temp_dir().join(format!("qaction-cli-fig1-{}", std::process::id()));
    let out = bin()
        .args(["--experiment", "fig1-potential-wave", "--seed", "20", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "stdout:\n{text}");
    assert!(dir.join("potential_wave.csv").exists());
    assert!(dir.join("manifest.json").exists());
    assert!(text.contains("PASS"));
    let _ = std::fs::remove_dir_all(&dir);
}
