//! Per-dot-product error distribution of the RNS core against the
//! low-precision fixed-point core at equal converter width.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::DotErrorCfg;
use crate::output::{fmt_f64, write_atomic, Csv};
use crate::{experiment_error, CliError, RunContext};
use rnsim_core::analog::{mvm_lp, mvm_rns, quantize_symmetric, CoreConfig};
use rnsim_core::rns::Preset;
use rnsim_core::seed;

pub struct DotErrorRow {
    pub trial: u64,
    pub rns_abs_error: f64,
    pub lp_abs_error: f64,
}

pub fn sample_dot_errors(
    bits: u32,
    h: u64,
    trials: u64,
    master_seed: u64,
) -> Result<Vec<DotErrorRow>, CliError> {
    let preset = Preset::from_data_bits(bits).ok_or_else(|| {
        CliError::ConfigInvalid(format!("no preset moduli set for {bits}-bit data"))
    })?;
    let rns = CoreConfig::rns_preset(preset, h).map_err(experiment_error)?;
    let lp = CoreConfig::lp(bits, h).map_err(experiment_error)?;
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(master_seed, trial));
            let w: Vec<f32> = (0..h).map(|_| rng.gen_range(-1.0f32..1.0)).collect();
            let x: Vec<f32> = (0..h).map(|_| rng.gen_range(-1.0f32..1.0)).collect();
            let reference: f64 = w.iter().zip(&x).map(|(&a, &b)| a as f64 * b as f64).sum();
            let qw = vec![quantize_symmetric(&w, bits).map_err(experiment_error)?];
            let qx = quantize_symmetric(&x, bits).map_err(experiment_error)?;
            let rns_out = mvm_rns(&qw, &qx, &rns).map_err(experiment_error)?;
            let lp_out = mvm_lp(&qw, &qx, &lp).map_err(experiment_error)?;
            Ok(DotErrorRow {
                trial,
                rns_abs_error: (rns_out.as_float[0] as f64 - reference).abs(),
                lp_abs_error: (lp_out.as_float[0] as f64 - reference).abs(),
            })
        })
        .collect()
}

pub fn median(mut values: Vec<f64>) -> f64 {
    assert!(!values.is_empty());
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

pub fn run_dot_error(cfg: &DotErrorCfg, ctx: &RunContext) -> Result<(), CliError> {
    let seed = ctx.seed(cfg.seed);
    let rows = sample_dot_errors(cfg.bits, cfg.h, cfg.trials, seed)?;

    let mut csv = Csv::new(&["trial", "coreKind", "b", "h", "absError"]);
    for row in &rows {
        csv.row(&[
            row.trial.to_string(),
            "rns".into(),
            cfg.bits.to_string(),
            cfg.h.to_string(),
            fmt_f64(row.rns_abs_error),
        ]);
        csv.row(&[
            row.trial.to_string(),
            "lp".into(),
            cfg.bits.to_string(),
            cfg.h.to_string(),
            fmt_f64(row.lp_abs_error),
        ]);
    }
    let path = ctx.out_dir.join("dot_error.csv");
    write_atomic(&path, &csv.into_bytes())?;

    let rns_median = median(rows.iter().map(|r| r.rns_abs_error).collect());
    let lp_median = median(rows.iter().map(|r| r.lp_abs_error).collect());
    println!("dot-error: {} trials, b={}, h={}", rows.len(), cfg.bits, cfg.h);
    println!("  median |error| rns = {rns_median:.6}");
    println!("  median |error| lp  = {lp_median:.6}");
    println!("  lp/rns             = {:.2}", lp_median / rns_median);
    println!("  wrote {}", path.display());
    Ok(())
}
