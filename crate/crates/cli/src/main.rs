use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rdm_cli::{
    default_config, emit_plot_data, load_config, output_dir, resolve_seed, run, Experiment, HarnessError, SEED_ENV,
};

/// Random discontinuous motion experiments.
///
/// Exit status: 0 when every invariant check passes, 1 when a check fails,
/// 2 for configuration errors, 3 for runtime errors.
#[derive(Parser)]
#[command(name = "rdm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate a single-particle state and record density snapshots
    Evolve(RunArgs),
    /// Draw discontinuous trajectories and rebuild the density from them
    Sample(RunArgs),
    /// Rebuild the wave function from its density and velocity field
    Reconstruct(RunArgs),
    /// Four-box two-particle scenario: branch matrix and box centres
    Fourbox(RunArgs),
    /// Two-box state with and without a self-interaction term
    Contrast(RunArgs),
    /// Continuity residual under grid and snapshot refinement
    Convergence(RunArgs),
    /// Regenerate plot tables for an existing run directory
    Plot { dir: PathBuf },
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration; defaults are used when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed, overriding SEED_OVERRIDE and the config
    #[arg(long)]
    seed: Option<u64>,
}

fn fail(err: &HarnessError, code: u8) -> ExitCode {
    eprint!("{}", err.to_toml());
    ExitCode::from(code)
}

fn execute(experiment: Experiment, args: RunArgs) -> ExitCode {
    let config = match &args.config {
        Some(path) => load_config(path, Some(experiment)),
        None => Ok(default_config(experiment)),
    };
    let mut config = match config {
        Ok(c) => c,
        Err(e) => return fail(&e, 2),
    };
    let env = std::env::var(SEED_ENV).ok();
    let source = match resolve_seed(&mut config, args.seed, env.as_deref()) {
        Ok(s) => s,
        Err(e) => return fail(&e, 2),
    };
    let dir = output_dir(&config, args.out.as_deref());
    let manifest = match run(&config, source, &dir).and_then(|m| emit_plot_data(&dir).map(|_| m)) {
        Ok(m) => m,
        Err(e) => return fail(&e, 3),
    };
    for c in &manifest.checks {
        println!("{} {} = {:e} ({})", if c.passed { "pass" } else { "FAIL" }, c.name, c.value, c.criterion);
    }
    println!("wrote {}", dir.display());
    if manifest.passed {
        ExitCode::SUCCESS
    } else {
        eprint!("{}", manifest.failure_report());
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let experiment = match cli.command {
        Command::Plot { dir } => {
            return match emit_plot_data(&dir) {
                Ok(paths) => {
                    for p in paths {
                        println!("{}", p.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e, 3),
            }
        }
        Command::Evolve(a) => (Experiment::Evolve, a),
        Command::Sample(a) => (Experiment::Sample, a),
        Command::Reconstruct(a) => (Experiment::Reconstruct, a),
        Command::Fourbox(a) => (Experiment::Fourbox, a),
        Command::Contrast(a) => (Experiment::Contrast, a),
        Command::Convergence(a) => (Experiment::Convergence, a),
    };
    execute(experiment.0, experiment.1)
}
