//! Experiment output contract: files land where the manifest says, hashes
//! match the bytes on disk, and reruns with the same seed are byte-identical
//! outside the manifest's timestamp fields.

use qaction::config::Config;
use qaction::experiments::{run_experiment, ExperimentContext, Manifest};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

fn tmp_dir(tag: &str) -> PathBuf {
    std::env::temp_dir().join(format!("qaction-io-{}-{tag}", std::process::id()))
}

fn run_fig1(dir: &Path) -> Manifest {
    let mut cfg = Config::default();
    cfg.set("fig1.n_points", "60");
    let ctx = ExperimentContext::new(cfg, dir, 20);
    run_experiment("fig1-potential-wave", &ctx).unwrap()
}

#[test]
fn manifest_lists_files_with_correct_hashes() {
    let dir = tmp_dir("hashes");
    let manifest = run_fig1(&dir);
    assert!(manifest.all_passed());
    assert!(!manifest.files.is_empty());
    for f in &manifest.files {
        let bytes = std::fs::read(dir.join(&f.name)).unwrap();
        let mut h = Sha256::new();
        h.update(&bytes);
        assert_eq!(format!("{:x}", h.finalize()), f.sha256, "hash mismatch for {}", f.name);
    }
    assert!(dir.join("manifest.json").exists());
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn reruns_are_byte_identical_modulo_timestamps() {
    let d1 = tmp_dir("rerun-a");
    let d2 = tmp_dir("rerun-b");
    let m1 = run_fig1(&d1);
    let m2 = run_fig1(&d2);
    for (f1, f2) in m1.files.iter().zip(&m2.files) {
        assert_eq!(f1.name, f2.name);
        assert_eq!(f1.sha256, f2.sha256, "content differs for {}", f1.name);
    }
    // manifests agree on everything except the timestamp fields
    let mut v1: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d1.join("manifest.json")).unwrap()).unwrap();
    let mut v2: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d2.join("manifest.json")).unwrap()).unwrap();
    for v in [&mut v1, &mut v2] {
        let obj = v.as_object_mut().unwrap();
        obj.remove("started_unix");
        obj.remove("wall_seconds");
    }
    assert_eq!(v1, v2);
    let _ = std::fs::remove_dir_all(&d1);
    let _ = std::fs::remove_dir_all(&d2);
}

#[test]
fn invalid_config_fails_before_any_output() {
    let dir = tmp_dir("invalid");
    let mut cfg = Config::default();
    cfg.set("classical.m", "-2.0");
    let ctx = ExperimentContext::new(cfg, &dir, 20);
    let err = run_experiment("fig1-potential-wave", &ctx).unwrap_err();
    let msg = format!("{err}");
    assert!(msg.contains('m'), "error should name the offending field: {msg}");
    assert!(!dir.join("potential_wave.csv").exists(), "no data files on validation failure");
    let _ = std::fs::remove_dir_all(&dir);
}
