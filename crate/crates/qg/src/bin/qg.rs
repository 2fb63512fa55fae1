use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qg::{parse_config, run, Experiment, PoolExecutor, RunError};

/// Barotropic quasi-geostrophic experiments under rapidly oscillating forcing.
#[derive(Debug, Parser)]
#[command(name = "qg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the full equation and export norms along the trajectory.
    Simulate(RunArgs),
    /// Compare full and averaged dynamics over a finite slow-time interval.
    Compare(RunArgs),
    /// Size of the bounded oscillatory corrector for each epsilon.
    #[command(name = "aux-v")]
    AuxV(RunArgs),
    /// Solve for the stationary state of the averaged equation.
    Stationary(RunArgs),
    /// Spectrum of the linearization at the stationary state.
    Spectrum(RunArgs),
    /// Decay of a perturbation towards the bounded solution.
    Decay(RunArgs),
    /// Distance of the bounded solution to the stationary state.
    Bounded(RunArgs),
    /// Harmonic content of the bounded solution.
    Frequencies(RunArgs),
    /// Semi-distance between full and averaged attractors.
    Attractor(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Worker threads for independent runs.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Output directory, overriding `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Command {
    fn split(self) -> (Experiment, RunArgs) {
        match self {
            Command::Simulate(a) => (Experiment::Simulate, a),
            Command::Compare(a) => (Experiment::Compare, a),
            Command::AuxV(a) => (Experiment::AuxV, a),
            Command::Stationary(a) => (Experiment::Stationary, a),
            Command::Spectrum(a) => (Experiment::Spectrum, a),
            Command::Decay(a) => (Experiment::Decay, a),
            Command::Bounded(a) => (Experiment::Bounded, a),
            Command::Frequencies(a) => (Experiment::Frequencies, a),
            Command::Attractor(a) => (Experiment::Attractor, a),
        }
    }
}

fn execute(experiment: Experiment, args: &RunArgs) -> Result<u8, RunError> {
    let cfg = parse_config(&args.config, experiment, args.out.as_deref())?;
    let exec = PoolExecutor::new(args.jobs)?;
    let manifest = run(&cfg, &exec)?;
    for c in &manifest.contracts {
        println!("{}: {} ({})", if c.held { "held" } else { "VIOLATED" }, c.name, c.detail);
    }
    println!("wrote {}", cfg.output_dir.join(qg::runner::MANIFEST_NAME).display());
    Ok(manifest.exit_code())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("QG_LOG", "error")).init();
    let (experiment, args) = Cli::parse().command.split();
    if args.jobs == 0 {
        eprintln!("error: --jobs must be at least 1");
        return ExitCode::from(1);
    }
    match execute(experiment, &args) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
