//! Named batch experiments reproducing the figures and studies, selected by
//! name from a registry at runtime, with deterministic seeding and structured
//! CSV + JSON-manifest output.

pub mod tolerances;
pub mod verify;

mod asymptotic;
mod boundary;
mod chaos;
mod fig1;
mod fig2;
mod resolution;

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::Config;
use crate::error::{Error, Result};

pub use verify::{verify, VerifyOptions, VerifyReport};

/// Everything an experiment needs to run.
#[derive(Debug, Clone)]
pub struct ExperimentContext {
    pub config: Config,
    pub out_dir: PathBuf,
    pub seed: u64,
}

impl ExperimentContext {
    pub fn new(config: Config, out_dir: impl Into<PathBuf>, seed: u64) -> Self {
        ExperimentContext { config, out_dir: out_dir.into(), seed }
    }
}

/// Outcome of one built-in check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// A file emitted by an experiment, with its content hash.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
}

/// Run manifest: inputs, versions, seed, wall time and per-check outcomes.
/// `started_unix` and `wall_seconds` are timestamp fields and the only parts
/// allowed to differ between identically seeded runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub experiment: String,
    pub version: String,
    pub seed: u64,
    pub inputs: BTreeMap<String, String>,
    pub started_unix: u64,
    pub wall_seconds: f64,
    pub checks: Vec<CheckOutcome>,
    pub files: Vec<FileEntry>,
}

impl Manifest {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// A named experiment strategy.
pub trait Experiment: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    /// Produce output files under `ctx.out_dir` and report emitted files,
    /// inputs and check outcomes.
    fn run(&self, ctx: &ExperimentContext) -> Result<ExperimentOutput>;
}

/// What an experiment hands back to the runner.
#[derive(Debug, Clone, Default)]
pub struct ExperimentOutput {
    pub inputs: BTreeMap<String, String>,
    pub checks: Vec<CheckOutcome>,
    pub files: Vec<FileEntry>,
}

/// All registered experiments keyed by name.
pub fn registry() -> BTreeMap<&'static str, Box<dyn Experiment>> {
    let mut map: BTreeMap<&'static str, Box<dyn Experiment>> = BTreeMap::new();
    for exp in [
        Box::new(fig1::Fig1PotentialWave) as Box<dyn Experiment>,
        Box::new(fig2::Fig2FitVsT),
        Box::new(boundary::BoundaryStudy),
        Box::new(resolution::ResolutionStudy),
        Box::new(asymptotic::AsymptoticCheck),
        Box::new(chaos::Fig3ChaosScan),
    ] {
        map.insert(exp.name(), exp);
    }
    map
}

/// Names of all registered experiments.
pub fn experiment_names() -> Vec<&'static str> {
    registry().keys().copied().collect()
}

/// Run one experiment by name, writing its data files and `manifest.json`
/// under `ctx.out_dir`. Returns the manifest; callers map `all_passed` to an
/// exit status.
pub fn run_experiment(name: &str, ctx: &ExperimentContext) -> Result<Manifest> {
    let reg = registry();
    let exp = reg
        .get(name)
        .ok_or_else(|| Error::validation("experiment", format!("unknown experiment `{name}`; known: {:?}", experiment_names())))?;
    std::fs::create_dir_all(&ctx.out_dir)?;
    let started_unix = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let clock = Instant::now();
    let out = exp.run(ctx)?;
    let manifest = Manifest {
        experiment: name.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: ctx.seed,
        inputs: out.inputs,
        started_unix,
        wall_seconds: clock.elapsed().as_secs_f64(),
        checks: out.checks,
        files: out.files,
    };
    let mut f = std::fs::File::create(ctx.out_dir.join("manifest.json"))?;
    f.write_all(serde_json::to_string_pretty(&manifest)?.as_bytes())?;
    f.write_all(b"\n")?;
    Ok(manifest)
}

/// Shortest round-trip decimal formatting; identical bits give identical text.
pub(crate) fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v}")
    }
}

/// Write an RFC-4180 CSV and return its manifest entry.
pub(crate) fn write_csv(dir: &Path, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<FileEntry> {
    let path = dir.join(name);
    let mut w = csv::WriterBuilder::new().from_path(&path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    drop(w);
    let bytes = std::fs::read(&path)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(FileEntry { name: name.to_string(), sha256: format!("{:x}", hasher.finalize()) })
}

/// A small gnuplot stub next to the data, as plot scaffolding.
pub(crate) fn write_gnuplot_stub(dir: &Path, name: &str, body: &str) -> Result<FileEntry> {
    let path = dir.join(name);
    std::fs::write(&path, body)?;
    let mut hasher = Sha256::new();
    hasher.update(body.as_bytes());
    Ok(FileEntry { name: name.to_string(), sha256: format!("{:x}", hasher.finalize()) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_contains_all_six_experiments() {
        let names = experiment_names();
        for want in [
            "fig1-potential-wave",
            "fig2-fit-vs-T",
            "boundary-study",
            "resolution-study",
            "asymptotic-check",
            "fig3-chaos-scan",
        ] {
            assert!(names.contains(&want), "missing experiment {want}");
        }
        assert_eq!(names.len(), 6);
    }

    #[test]
    fn unknown_experiment_is_a_validation_error() {
        let ctx = ExperimentContext::new(Config::default(), std::env::temp_dir().join("qaction-none"), 1);
        let err = run_experiment("no-such", &ctx).unwrap_err();
        assert!(matches!(err, Error::Validation { .. }));
    }
}
