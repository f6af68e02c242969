//! Built-in oracle suites: CRT round trips, RNS/HP equivalence, code
//! distance counts against enumeration, Monte Carlo against the closed
//! forms where they agree exactly, and hybrid arithmetic against big
//! integers. Artifacts are byte-deterministic for a given seed under any
//! thread count.

use num_bigint::{BigUint, RandBigInt};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::VerifyCfg;
use crate::output::{write_atomic, Csv};
use crate::{CliError, RunContext};
use rnsim_core::analog::{mvm_hp, mvm_rns, quantize_symmetric, CoreConfig};
use rnsim_core::hybrid::{from_hybrid, hybrid_add, hybrid_mul, to_hybrid, HybridConfig};
use rnsim_core::nn;
use rnsim_core::rns::{ModuliSet, Preset};
use rnsim_core::rrns::{
    monte_carlo_p_err, monte_carlo_probabilities, output_error_probability, Attempts, RrnsConfig,
};
use rnsim_core::seed;

/// Test hooks; the CLI always runs with defaults.
#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    /// Deliberately flips one residue inside the round-trip suite; the
    /// suite must then fail (negative control).
    pub fault_injection: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SuiteOutcome {
    pub name: String,
    pub cases: u64,
    pub failures: u64,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub seed_a: u64,
    pub seed_b: u64,
    pub suites_seed_a: Vec<SuiteOutcome>,
    pub suites_seed_b: Vec<SuiteOutcome>,
    /// Re-running seed A reproduced byte-identical suite artifacts.
    pub deterministic: bool,
    /// Both seeds produced the same pass/fail verdict per suite.
    pub verdicts_agree: bool,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.deterministic
            && self.verdicts_agree
            && self.suites_seed_a.iter().all(SuiteOutcome::passed)
    }

    pub fn failing_suites(&self) -> Vec<String> {
        let mut failing: Vec<String> = self
            .suites_seed_a
            .iter()
            .filter(|s| !s.passed())
            .map(|s| s.name.clone())
            .collect();
        if !self.deterministic {
            failing.push("determinism-self-check".into());
        }
        if !self.verdicts_agree {
            failing.push("seed-verdict-stability".into());
        }
        failing
    }

    pub fn print_summary(&self) {
        println!("verify: seeds {} and {}", self.seed_a, self.seed_b);
        for s in &self.suites_seed_a {
            println!(
                "  {:<22} cases={:<8} failures={:<4} {}",
                s.name,
                s.cases,
                s.failures,
                if s.passed() { "pass" } else { "FAIL" }
            );
        }
        println!(
            "  determinism self-check: {}",
            if self.deterministic { "pass" } else { "FAIL" }
        );
        println!(
            "  seed verdict stability: {}",
            if self.verdicts_agree { "pass" } else { "FAIL" }
        );
    }
}

fn suites_csv(suites: &[SuiteOutcome]) -> Vec<u8> {
    let mut csv = Csv::new(&["suite", "cases", "failures", "verdict"]);
    for s in suites {
        csv.row(&[
            s.name.clone(),
            s.cases.to_string(),
            s.failures.to_string(),
            if s.passed() { "pass".into() } else { "fail".into() },
        ]);
    }
    csv.into_bytes()
}

pub fn run_verify(
    cfg: &VerifyCfg,
    ctx: &RunContext,
    opts: &VerifyOptions,
) -> Result<VerifyReport, CliError> {
    let seed_a = ctx.seed(cfg.seed);
    let seed_b = cfg.seed_b.unwrap_or(seed_a.wrapping_add(1));

    let suites_a = run_all_suites(seed_a, opts);
    let suites_a_repeat = run_all_suites(seed_a, opts);
    let deterministic = suites_csv(&suites_a) == suites_csv(&suites_a_repeat);
    let suites_b = run_all_suites(seed_b, opts);
    let verdicts_agree = suites_a
        .iter()
        .zip(&suites_b)
        .all(|(a, b)| a.name == b.name && a.passed() == b.passed());

    let report = VerifyReport {
        seed_a,
        seed_b,
        suites_seed_a: suites_a,
        suites_seed_b: suites_b,
        deterministic,
        verdicts_agree,
    };

    write_atomic(&ctx.out_dir.join("verify_suites.csv"), &suites_csv(&report.suites_seed_a))?;
    let json = serde_json::to_vec_pretty(&report)
        .map_err(|e| CliError::ExperimentFailed(e.to_string()))?;
    let mut json = json;
    json.push(b'\n');
    write_atomic(&ctx.out_dir.join("verify_report.json"), &json)?;
    Ok(report)
}

fn run_all_suites(seed: u64, opts: &VerifyOptions) -> Vec<SuiteOutcome> {
    vec![
        crt_round_trip(seed, opts),
        rns_hp_equivalence(seed),
        code_distance_brute_force(),
        mc_vs_analytic(seed),
        hybrid_vs_big_integer(seed),
    ]
}

fn crt_round_trip(seed: u64, opts: &VerifyOptions) -> SuiteOutcome {
    let mut cases = 0u64;
    let mut failures = 0u64;
    // Exhaustive over a small set.
    let small = ModuliSet::new(&[3, 5, 7]).unwrap();
    let psi = small.psi().to_i64().unwrap();
    for value in -psi..=psi {
        cases += 1;
        let rv = small.forward_convert_i64(value).unwrap();
        if small.crt_reconstruct_i64(&rv).unwrap() != value {
            failures += 1;
        }
    }
    // Randomized over the presets.
    for (pi, preset) in Preset::ALL.into_iter().enumerate() {
        let ms = ModuliSet::from_preset(preset);
        let psi = ms.psi().to_i64().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed::derive_n(seed, &[1, pi as u64]));
        for case in 0..10_000u64 {
            cases += 1;
            let value = rng.gen_range(-psi..=psi);
            let rv = ms.forward_convert_i64(value).unwrap();
            let tampered;
            let rv = if opts.fault_injection && case == 0 {
                let mut residues = rv.residues().to_vec();
                residues[0] = (residues[0] + 1) % ms.moduli()[0];
                tampered = ms.vector_from_residues(residues).unwrap();
                &tampered
            } else {
                &rv
            };
            if ms.crt_reconstruct_i64(rv).unwrap() != value {
                failures += 1;
            }
        }
    }
    SuiteOutcome { name: "crt-round-trip".into(), cases, failures }
}

fn rns_hp_equivalence(seed: u64) -> SuiteOutcome {
    let mut cases = 0u64;
    let mut failures = 0u64;
    let h = 16usize;
    for (pi, preset) in Preset::ALL.into_iter().enumerate() {
        let bits = preset.data_bits();
        let rns = CoreConfig::rns_preset(preset, h as u64).unwrap();
        let hp = CoreConfig::hp(bits, h as u64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed::derive_n(seed, &[2, pi as u64]));
        for _ in 0..20 {
            cases += 1;
            let rows: Vec<_> = (0..h)
                .map(|_| {
                    let v: Vec<f32> = (0..h).map(|_| rng.gen_range(-1.0f32..1.0)).collect();
                    quantize_symmetric(&v, bits).unwrap()
                })
                .collect();
            let xv: Vec<f32> = (0..h).map(|_| rng.gen_range(-1.0f32..1.0)).collect();
            let x = quantize_symmetric(&xv, bits).unwrap();
            let a = mvm_rns(&rows, &x, &rns).unwrap();
            let b = mvm_hp(&rows, &x, &hp).unwrap();
            if a.raw != b.raw {
                failures += 1;
            }
        }
    }
    SuiteOutcome { name: "rns-hp-equivalence".into(), cases, failures }
}

fn code_distance_brute_force() -> SuiteOutcome {
    let mut cases = 0u64;
    let mut failures = 0u64;
    let codes = [
        RrnsConfig::new(&[3, 5], &[7]).unwrap(),
        RrnsConfig::new(&[3, 5], &[7, 11]).unwrap(),
        RrnsConfig::new(&[2, 3], &[5, 7]).unwrap(),
    ];
    for code in &codes {
        let m = code.legitimate_m().to_u64().unwrap();
        let mut census = vec![0u64; code.total_moduli() + 1];
        for v in 0..m {
            let d = code.all_moduli().iter().filter(|&&modulus| v % modulus != 0).count();
            census[d] += 1;
        }
        let mut total = BigUint::from(0u32);
        for (eta, &want) in census.iter().enumerate() {
            cases += 1;
            let got = code.code_distance(eta).unwrap();
            if got != BigUint::from(want) {
                failures += 1;
            }
            total += got;
        }
        cases += 1;
        if total != *code.legitimate_m() {
            failures += 1;
        }
    }
    SuiteOutcome { name: "code-distance-census".into(), cases, failures }
}

fn mc_vs_analytic(seed: u64) -> SuiteOutcome {
    let mut cases = 0u64;
    let mut failures = 0u64;

    // Correctable probability is exact for the decoder at any code.
    let small = RrnsConfig::new(&[3, 5], &[7]).unwrap();
    for (i, p) in [0.01f64, 0.1].into_iter().enumerate() {
        cases += 1;
        let analytic = small.error_probabilities(p);
        let trials = 200_000u64;
        let mc = monte_carlo_probabilities(&small, p, trials, seed::derive_n(seed, &[3, i as u64]));
        let sigma = (analytic.p_c * (1.0 - analytic.p_c) / trials as f64).sqrt();
        if (mc.p_c - analytic.p_c).abs() > 3.0 * sigma {
            failures += 1;
        }
    }

    // Undetected-error probability at small p, where the closed form and
    // the per-residue error model agree within Monte Carlo resolution.
    {
        cases += 1;
        let p = 0.01;
        let analytic = small.error_probabilities(p);
        let trials = 200_000u64;
        let mc = monte_carlo_probabilities(&small, p, trials, seed::derive_n(seed, &[3, 7]));
        let sigma = (analytic.p_u * (1.0 - analytic.p_u) / trials as f64).sqrt();
        if (mc.p_u - analytic.p_u).abs() > 3.0 * sigma.max(1e-9) {
            failures += 1;
        }
    }

    // Single-attempt retry error is exactly 1 - p_c.
    {
        cases += 1;
        let code = RrnsConfig::new(&[63, 62, 61, 59], &[67, 65]).unwrap();
        let p = 0.05;
        let probs = code.error_probabilities(p);
        let analytic = output_error_probability(&probs, Attempts::Finite(1));
        let trials = 100_000u64;
        let est = monte_carlo_p_err(&code, p, 1, trials, seed::derive_n(seed, &[3, 8]));
        let sigma = (analytic * (1.0 - analytic) / trials as f64).sqrt();
        if (est.p_err - analytic).abs() > 3.0 * sigma {
            failures += 1;
        }
    }

    SuiteOutcome { name: "mc-vs-analytic".into(), cases, failures }
}

fn hybrid_vs_big_integer(seed: u64) -> SuiteOutcome {
    let mut cases = 0u64;
    let mut failures = 0u64;
    let configs = [
        HybridConfig::new(&[3, 5], &[7, 11]).unwrap(),
        HybridConfig::new(&[15, 14, 13, 11], &[17, 19, 23, 29]).unwrap(),
    ];
    for (ci, cfg) in configs.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed::derive_n(seed, &[4, ci as u64]));
        let m_p = cfg.primary().product().clone();
        for _ in 0..2_000 {
            cases += 1;
            let va = rng.gen_biguint_below(&m_p.pow(2));
            let vb = rng.gen_biguint_below(&m_p.pow(2));
            let a = to_hybrid(&va, 2, cfg).unwrap();
            let b = to_hybrid(&vb, 2, cfg).unwrap();
            let sum_ok = from_hybrid(&hybrid_add(&a, &b, cfg).unwrap(), cfg).unwrap() == &va + &vb;
            let mul_ok = from_hybrid(&hybrid_mul(&a, &b, cfg).unwrap(), cfg).unwrap() == &va * &vb;
            if !sum_ok || !mul_ok {
                failures += 1;
            }
        }
    }
    // The weights-file round trip guards the remaining artifact format.
    {
        cases += 1;
        let spec = nn::ModelSpec {
            layers: vec![
                nn::LayerSpec::Linear { inputs: 3, outputs: 4 },
                nn::LayerSpec::Relu,
                nn::LayerSpec::Linear { inputs: 4, outputs: 2 },
            ],
        };
        let model = nn::Model::init(&spec, seed);
        let mut path = std::env::temp_dir();
        path.push(format!("rnsim-verify-{}-{seed}.rnst", std::process::id()));
        let ok = nn::save_weights(&model, &path).is_ok()
            && nn::load_weights(&spec, &path)
                .map(|m| {
                    m.parameters()
                        .iter()
                        .zip(model.parameters())
                        .all(|(a, b)| a.data() == b.data())
                })
                .unwrap_or(false);
        std::fs::remove_file(&path).ok();
        if !ok {
            failures += 1;
        }
    }
    SuiteOutcome { name: "hybrid-vs-big-integer".into(), cases, failures }
}
