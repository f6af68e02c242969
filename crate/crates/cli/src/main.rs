use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rnsim_cli::config::{self, ExperimentConfig};
use rnsim_cli::{experiments, CliError, RunContext};

/// Simulation workbench for residue-number-system analog GEMM cores.
///
/// Environment: RNSIM_OUT_DIR overrides the configured output directory
/// (the --out flag wins over both); RNSIM_THREADS caps the worker pool.
#[derive(Parser)]
#[command(name = "rnsim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON experiment config; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config's random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for artifacts.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Dot-product error distribution: RNS vs low-precision fixed point.
    DotError(CommonArgs),
    /// Data-converter energy comparison across core kinds and widths.
    Energy(CommonArgs),
    /// Analytical output-error-probability curves over (p, k, attempts).
    PerrCurve(CommonArgs),
    /// Monte Carlo decode simulation against the analytical curve.
    RrnsMc(CommonArgs),
    /// Accuracy of a trained model under injected output corruption.
    NoiseSweep(CommonArgs),
    /// Train a desk-scale model on a simulated core.
    Train(CommonArgs),
    /// Evaluate stored weights on a dataset.
    Infer(CommonArgs),
    /// Randomized oracle suite for the hybrid digit arithmetic.
    HybridCheck(CommonArgs),
    /// Run the built-in oracle suites and write a determinism report.
    Verify(CommonArgs),
}

impl Command {
    fn experiment_name(&self) -> &'static str {
        match self {
            Command::DotError(_) => "dot-error",
            Command::Energy(_) => "energy",
            Command::PerrCurve(_) => "perr-curve",
            Command::RrnsMc(_) => "rrns-mc",
            Command::NoiseSweep(_) => "noise-sweep",
            Command::Train(_) => "train",
            Command::Infer(_) => "infer",
            Command::HybridCheck(_) => "hybrid-check",
            Command::Verify(_) => "verify",
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::DotError(a)
            | Command::Energy(a)
            | Command::PerrCurve(a)
            | Command::RrnsMc(a)
            | Command::NoiseSweep(a)
            | Command::Train(a)
            | Command::Infer(a)
            | Command::HybridCheck(a)
            | Command::Verify(a) => a,
        }
    }
}

fn init_thread_pool() -> Result<(), CliError> {
    if let Ok(value) = std::env::var("RNSIM_THREADS") {
        let threads: usize = value
            .parse()
            .map_err(|_| CliError::ConfigInvalid(format!("RNSIM_THREADS={value:?} is not a thread count")))?;
        if threads == 0 {
            return Err(CliError::ConfigInvalid("RNSIM_THREADS must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::ExperimentFailed(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    init_thread_pool()?;
    let name = cli.command.experiment_name();
    let args = cli.command.args();
    let config = match &args.config {
        Some(path) => config::load(path, name)?,
        None => ExperimentConfig::default_for(name)?,
    };
    let out_dir = args
        .out
        .clone()
        .or_else(|| std::env::var_os("RNSIM_OUT_DIR").map(PathBuf::from))
        .or_else(|| config.out_dir().cloned())
        .unwrap_or_else(|| PathBuf::from("out"));
    let ctx = RunContext { out_dir, seed_override: args.seed };
    experiments::run(&config, &ctx)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
