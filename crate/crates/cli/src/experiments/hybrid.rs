//! Randomized oracle suite for the hybrid digit arithmetic.

use num_bigint::{BigUint, RandBigInt};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::HybridCheckCfg;
use crate::output::{write_atomic, Csv};
use crate::{CliError, RunContext};
use rnsim_core::hybrid::{
    from_hybrid, hybrid_add, hybrid_dot, hybrid_mul, normalize_digits, raw_from_values, to_hybrid,
    HybridConfig,
};
use rnsim_core::seed;

struct SuiteResult {
    suite: &'static str,
    config: &'static str,
    cases: u64,
    failures: u64,
}

fn configs() -> Result<[(HybridConfig, &'static str, usize); 2], CliError> {
    let small = HybridConfig::new(&[3, 5], &[7, 11])
        .map_err(|e| CliError::ExperimentFailed(e.to_string()))?;
    let large = HybridConfig::new(&[15, 14, 13, 11], &[17, 19, 23, 29])
        .map_err(|e| CliError::ExperimentFailed(e.to_string()))?;
    // h limits keep per-digit accumulation inside M_p * M_s.
    Ok([(small, "primary{3,5}", 2), (large, "primary{15,14,13,11}", 4)])
}

pub fn run_hybrid_check(cfg: &HybridCheckCfg, ctx: &RunContext) -> Result<(), CliError> {
    let master_seed = ctx.seed(cfg.seed);
    let mut results: Vec<SuiteResult> = Vec::new();

    for (ci, (hybrid_cfg, label, h_max)) in configs()?.into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(master_seed, ci as u64));
        let m_p = hybrid_cfg.primary().product().clone();
        let mut failures = [0u64; 3]; // add, mul, dot
        for _ in 0..cfg.cases {
            let da = rng.gen_range(1usize..=2);
            let db = rng.gen_range(1usize..=2);
            let va = rng.gen_biguint_below(&m_p.pow(da as u32));
            let vb = rng.gen_biguint_below(&m_p.pow(db as u32));
            let a = to_hybrid(&va, da, &hybrid_cfg).unwrap();
            let b = to_hybrid(&vb, db, &hybrid_cfg).unwrap();
            let sum = hybrid_add(&a, &b, &hybrid_cfg).unwrap();
            if from_hybrid(&sum, &hybrid_cfg).unwrap() != &va + &vb {
                failures[0] += 1;
            }
            let prod = hybrid_mul(&a, &b, &hybrid_cfg).unwrap();
            if from_hybrid(&prod, &hybrid_cfg).unwrap() != &va * &vb {
                failures[1] += 1;
            }
        }
        for _ in 0..cfg.cases / 10 {
            let h = rng.gen_range(1usize..=h_max);
            let xs: Vec<_> = (0..h)
                .map(|_| {
                    let v = rng.gen_biguint_below(&m_p);
                    to_hybrid(&v, 1, &hybrid_cfg).unwrap()
                })
                .collect();
            let ys: Vec<_> = (0..h)
                .map(|_| {
                    let v = rng.gen_biguint_below(&m_p);
                    to_hybrid(&v, 1, &hybrid_cfg).unwrap()
                })
                .collect();
            let want: BigUint = xs
                .iter()
                .zip(&ys)
                .map(|(x, y)| {
                    from_hybrid(x, &hybrid_cfg).unwrap() * from_hybrid(y, &hybrid_cfg).unwrap()
                })
                .sum();
            let dot = hybrid_dot(&xs, &ys, &hybrid_cfg).unwrap();
            if from_hybrid(&dot, &hybrid_cfg).unwrap() != want {
                failures[2] += 1;
            }
        }
        results.push(SuiteResult { suite: "add", config: label, cases: cfg.cases, failures: failures[0] });
        results.push(SuiteResult { suite: "mul", config: label, cases: cfg.cases, failures: failures[1] });
        results.push(SuiteResult { suite: "dot", config: label, cases: cfg.cases / 10, failures: failures[2] });
    }

    // Exhaustive overflow detection on the small config.
    let (small, label, _) = configs()?.into_iter().next().unwrap();
    let limit = small.combined_range().to_u64().unwrap();
    let m_p = small.primary().product().to_u64().unwrap();
    let mut detector_failures = 0u64;
    for v in 0..limit {
        let raw = raw_from_values(&[BigUint::from(v)], &small).unwrap();
        let normalized = normalize_digits(&raw, &small).unwrap();
        let value_ok = from_hybrid(&normalized, &small).unwrap() == BigUint::from(v);
        let quotient_ok = normalized.digit_value(0, &small) == BigUint::from(v % m_p);
        if !value_ok || !quotient_ok {
            detector_failures += 1;
        }
    }
    results.push(SuiteResult {
        suite: "overflow-detector",
        config: label,
        cases: limit,
        failures: detector_failures,
    });

    let mut csv = Csv::new(&["suite", "config", "cases", "failures"]);
    println!("hybrid-check:");
    let mut any_failed = false;
    for r in &results {
        println!(
            "  {:<18} {:<22} cases={:<7} failures={}",
            r.suite, r.config, r.cases, r.failures
        );
        csv.row(&[
            r.suite.into(),
            r.config.into(),
            r.cases.to_string(),
            r.failures.to_string(),
        ]);
        any_failed |= r.failures > 0;
    }
    let path = ctx.out_dir.join("hybrid_check.csv");
    write_atomic(&path, &csv.into_bytes())?;
    println!("  wrote {}", path.display());
    if any_failed {
        return Err(CliError::ExperimentFailed("hybrid arithmetic diverged from the big-integer oracle".into()));
    }
    Ok(())
}
