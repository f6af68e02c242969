//! Analytical retry-error curves and their Monte Carlo cross-check.

use crate::config::{PerrCurveCfg, RrnsMcCfg};
use crate::output::{fmt_f64, write_atomic, Csv};
use crate::{CliError, RunContext};
use rnsim_core::rrns::{
    monte_carlo_p_err, output_error_probability, Attempts, RrnsConfig,
};

pub fn run_perr_curve(cfg: &PerrCurveCfg, ctx: &RunContext) -> Result<(), CliError> {
    let p_values = cfg.p_grid.values()?;
    let attempts: Result<Vec<Attempts>, _> =
        cfg.attempts.iter().map(|a| a.resolve()).collect();
    let attempts = attempts?;

    let mut csv = Csv::new(&["p", "k", "R", "p_c", "p_d", "p_u", "p_err"]);
    for &k in &cfg.k_values {
        let code = cfg.code_for_k(k)?;
        for &p in &p_values {
            let probs = code.error_probabilities(p);
            for &r in &attempts {
                let p_err = output_error_probability(&probs, r);
                csv.row(&[
                    fmt_f64(p),
                    k.to_string(),
                    r.to_string(),
                    fmt_f64(probs.p_c),
                    fmt_f64(probs.p_d),
                    fmt_f64(probs.p_u),
                    fmt_f64(p_err),
                ]);
            }
        }
    }
    let path = ctx.out_dir.join("perr_curve.csv");
    write_atomic(&path, &csv.into_bytes())?;
    println!(
        "perr-curve: {} p-values x k in {:?} x attempts {:?} over preset {}",
        p_values.len(),
        cfg.k_values,
        cfg.attempts.iter().map(|a| a.resolve().unwrap().to_string()).collect::<Vec<_>>(),
        cfg.preset,
    );
    println!("  wrote {}", path.display());
    Ok(())
}

pub fn run_rrns_mc(cfg: &RrnsMcCfg, ctx: &RunContext) -> Result<(), CliError> {
    let code = RrnsConfig::new(&cfg.non_redundant, &cfg.redundant)
        .map_err(|e| CliError::ConfigInvalid(e.to_string()))?;
    let seed = ctx.seed(cfg.seed);

    let mut csv = Csv::new(&[
        "p",
        "k",
        "R",
        "trials",
        "empirical_p_err",
        "analytic_p_err",
        "std_err",
    ]);
    println!(
        "rrns-mc: code n={:?} k={:?}, {} trials per point",
        cfg.non_redundant, cfg.redundant, cfg.trials
    );
    for (i, &p) in cfg.p_values.iter().enumerate() {
        if !(0.0..=1.0).contains(&p) {
            return Err(CliError::ConfigInvalid(format!("p = {p} is not a probability")));
        }
        let probs = code.error_probabilities(p);
        for (j, &r) in cfg.attempts.iter().enumerate() {
            if r < 1 {
                return Err(CliError::ConfigInvalid("attempts must be >= 1".into()));
            }
            let analytic = output_error_probability(&probs, Attempts::Finite(r));
            let point_seed = rnsim_core::seed::derive_n(seed, &[i as u64, j as u64]);
            let est = monte_carlo_p_err(&code, p, r, cfg.trials, point_seed);
            csv.row(&[
                fmt_f64(p),
                code.k().to_string(),
                r.to_string(),
                est.trials.to_string(),
                fmt_f64(est.p_err),
                fmt_f64(analytic),
                fmt_f64(est.std_err),
            ]);
            println!(
                "  p={p:<8} R={r}: empirical={:<12} analytic={:<12} (sigma {:.2e})",
                format!("{:.6}", est.p_err),
                format!("{:.6}", analytic),
                est.std_err
            );
        }
    }
    let path = ctx.out_dir.join("rrns_mc.csv");
    write_atomic(&path, &csv.into_bytes())?;
    println!("  wrote {}", path.display());
    Ok(())
}
