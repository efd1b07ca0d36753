use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::Parser;

use qaction::config::Config;
use qaction::experiments::{self, ExperimentContext, VerifyOptions};

/// Batch front-end for the quantum-action experiment suite.
#[derive(Parser, Debug)]
#[command(name = "qaction", version, about)]
struct Args {
    /// Plain-text key/value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Experiment to run (see --list).
    #[arg(long)]
    experiment: Option<String>,

    /// RNG seed for sampling and multi-start jitter.
    #[arg(long)]
    seed: Option<u64>,

    /// Worker threads (defaults to available cores).
    #[arg(long)]
    jobs: Option<usize>,

    /// Output directory for data files and the manifest.
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Run the fast self-check suite and exit.
    #[arg(long)]
    verify: bool,

    /// List available experiments and exit.
    #[arg(long)]
    list: bool,
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run() -> anyhow::Result<bool> {
    let args = Args::parse();

    if let Some(jobs) = args.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .context("configuring the worker pool")?;
    }

    if args.list {
        println!("available experiments:");
        for (name, exp) in experiments::registry() {
            println!("  {name:24} {}", exp.description());
        }
        return Ok(true);
    }

    if args.verify {
        let report = experiments::verify(&VerifyOptions::default());
        print!("{report}");
        return Ok(report.all_passed());
    }

    let config = match &args.config {
        Some(path) => Config::load(path).with_context(|| format!("loading {}", path.display()))?,
        None => Config::default(),
    };
    let experiment = match args.experiment.clone().or_else(|| config.get("experiment").map(String::from)) {
        Some(name) => name,
        None => bail!("no experiment selected: pass --experiment <name> (or --list, --verify)"),
    };
    let seed = match args.seed {
        Some(s) => s,
        None => config.get_u64("seed", 20)?,
    };

    let ctx = ExperimentContext::new(config, &args.out, seed);
    let manifest = experiments::run_experiment(&experiment, &ctx)
        .with_context(|| format!("running experiment `{experiment}`"))?;
    println!("experiment: {} (seed {})", manifest.experiment, manifest.seed);
    for f in &manifest.files {
        println!("  wrote {} ({})", ctx.out_dir.join(&f.name).display(), &f.sha256[..12]);
    }
    for c in &manifest.checks {
        println!("  [{}] {:36} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    println!("  manifest: {}", ctx.out_dir.join("manifest.json").display());
    Ok(manifest.all_passed())
}
