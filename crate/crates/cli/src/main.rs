//! Command line front end: evaluate scene manifests, generate synthetic
//! scenes, validate inputs.
//!
//! Exit codes: 0 on success, 1 when the inputs fail to parse or validate
//! (including bad command lines), 2 when a valid run fails at runtime
//! (typically output IO).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use signsight::io::manifest::{load_scene, LoadError};
use signsight::io::params_file::apply_param_overrides;
use signsight::io::report::write_reports;
use signsight::synthetic::{generate_synthetic_scene, SynthError};
use signsight::{evaluate, EvaluationOptions};

#[derive(Parser)]
#[command(
    name = "signsight",
    version,
    about = "Traffic sign visibility and timely recognizability from annotated road point clouds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every sign in a scene manifest and write reports.
    Evaluate(EvaluateArgs),
    /// Generate a synthetic scene (clouds, manifest, ground truth) from a
    /// spec file.
    GenSynthetic(GenArgs),
    /// Load and validate a scene manifest without evaluating it.
    Validate {
        /// Scene manifest to check.
        manifest: PathBuf,
    },
}

#[derive(Args)]
struct EvaluateArgs {
    /// Scene manifest describing trajectory, clouds, and signs.
    manifest: PathBuf,
    /// Directory the report files are written into.
    #[arg(short, long)]
    output: PathBuf,
    /// Also write the per-lane visibility field as CSV, one file per sign.
    #[arg(long)]
    export_field: bool,
    /// Extra model parameter overrides, one `key = value` per line.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Cap on worker threads for per-sign evaluation.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct GenArgs {
    /// Synthetic scene spec.
    spec: PathBuf,
    /// Directory the scene files are written into.
    #[arg(short, long)]
    output: PathBuf,
}

/// A failed run, split by who gets the blame: bad inputs or a runtime
/// fault.  The distinction is the exit code contract.
enum Failure {
    Validation(String),
    Runtime(String),
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        Failure::Validation(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests travel the error path but are not
            // failures; everything else is a bad command line.
            let _ = e.print();
            return if e.exit_code() == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    let result = match cli.command {
        Command::Evaluate(args) => run_evaluate(&args),
        Command::GenSynthetic(args) => run_generate(&args),
        Command::Validate { manifest } => run_validate(&manifest),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run_evaluate(args: &EvaluateArgs) -> Result<(), Failure> {
    let (mut scene, library) = load_scene(&args.manifest)?;
    if let Some(path) = &args.params {
        apply_param_overrides(&mut scene.params, path)?;
    }
    let report = evaluate(&scene, &library, &EvaluationOptions { jobs: args.jobs });
    std::fs::create_dir_all(&args.output).map_err(|e| {
        Failure::Runtime(format!("cannot create {}: {e}", args.output.display()))
    })?;
    let written = write_reports(&report, &args.output, args.export_field)
        .map_err(|e| Failure::Runtime(format!("writing reports: {e}")))?;
    for sign in &report.signs {
        let timely = sign.lanes.iter().filter(|l| l.timely == 1).count();
        println!("sign {}: {}/{} lanes timely", sign.id, timely, sign.lanes.len());
    }
    for failure in &report.failures {
        println!("sign {} failed: {}", failure.id, failure.error);
    }
    if report.signs.is_empty() && report.failures.is_empty() {
        println!("no signs in manifest");
    }
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn run_generate(args: &GenArgs) -> Result<(), Failure> {
    let written = generate_synthetic_scene(&args.spec, &args.output).map_err(|e| match e {
        SynthError::Spec { .. } | SynthError::Inconsistent(_) => {
            Failure::Validation(e.to_string())
        }
        SynthError::Io { .. } | SynthError::Cloud(_) => Failure::Runtime(e.to_string()),
    })?;
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn run_validate(manifest: &PathBuf) -> Result<(), Failure> {
    let (scene, library) = load_scene(manifest)?;
    println!(
        "manifest ok: {} sign(s), {} marking cluster(s), {} environment point(s), trajectory {:.1} m",
        scene.signs.len(),
        scene.markings.len(),
        scene.environment.len(),
        scene.trajectory.total_length(),
    );
    let names: Vec<&str> = library.names().collect();
    println!("library: {}", names.join(", "));
    Ok(())
}
