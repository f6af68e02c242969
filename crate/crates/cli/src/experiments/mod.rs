//! One module per experiment family; `run` dispatches a parsed config.

mod dot_error;
mod energy;
mod hybrid;
mod nn;
mod perr;

pub use dot_error::run_dot_error;
pub use energy::run_energy;
pub use hybrid::run_hybrid_check;
pub use nn::{run_infer, run_noise_sweep, run_train};
pub use perr::{run_perr_curve, run_rrns_mc};

use crate::config::ExperimentConfig;
use crate::verify::run_verify;
use crate::{CliError, RunContext};

/// Runs a configured experiment and prints its summary table. Artifacts
/// are written atomically under the context's output directory.
pub fn run(config: &ExperimentConfig, ctx: &RunContext) -> Result<(), CliError> {
    match config {
        ExperimentConfig::DotError(cfg) => run_dot_error(cfg, ctx),
        ExperimentConfig::Energy(cfg) => run_energy(cfg, ctx),
        ExperimentConfig::PerrCurve(cfg) => run_perr_curve(cfg, ctx),
        ExperimentConfig::RrnsMc(cfg) => run_rrns_mc(cfg, ctx),
        ExperimentConfig::NoiseSweep(cfg) => run_noise_sweep(cfg, ctx),
        ExperimentConfig::Train(cfg) => run_train(cfg, ctx),
        ExperimentConfig::Infer(cfg) => run_infer(cfg, ctx),
        ExperimentConfig::HybridCheck(cfg) => run_hybrid_check(cfg, ctx),
        ExperimentConfig::Verify(cfg) => {
            let report = run_verify(cfg, ctx, &Default::default())?;
            report.print_summary();
            if report.all_passed() {
                Ok(())
            } else {
                Err(CliError::VerificationFailed(report.failing_suites().join(", ")))
            }
        }
    }
}
