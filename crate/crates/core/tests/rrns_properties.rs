//! Redundant-RNS properties: closed forms against enumeration, decoder
//! guarantees, and the analytical retry curve.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rnsim_core::rrns::{
    monte_carlo_p_err, output_error_probability, Attempts, DecodeOutcome, RrnsConfig,
};

fn rns6_plus(redundant: &[u64]) -> RrnsConfig {
    RrnsConfig::new(&[63, 62, 61, 59], redundant).unwrap()
}

/// Census of codeword distances from the zero codeword.
fn distance_census(cfg: &RrnsConfig) -> Vec<u64> {
    let m = cfg.legitimate_m().to_u64().unwrap();
    let mut counts = vec![0u64; cfg.total_moduli() + 1];
    for v in 0..m {
        let d = cfg
            .all_moduli()
            .iter()
            .filter(|&&modulus| v % modulus != 0)
            .count();
        counts[d] += 1;
    }
    counts
}

#[test]
fn code_distance_matches_enumeration_on_small_codes() {
    let codes = [
        RrnsConfig::new(&[3, 5], &[7]).unwrap(),
        RrnsConfig::new(&[3, 5], &[7, 11]).unwrap(),
        RrnsConfig::new(&[2, 3], &[5, 7]).unwrap(),
        RrnsConfig::new(&[5, 7], &[11, 13]).unwrap(),
        RrnsConfig::new(&[8, 9, 5], &[11, 13]).unwrap(),
    ];
    for cfg in &codes {
        let census = distance_census(cfg);
        let mut total = BigUint::zero();
        for (eta, &want) in census.iter().enumerate() {
            let got = cfg.code_distance(eta).unwrap();
            assert_eq!(got, BigUint::from(want), "eta={eta} moduli={:?}", cfg.all_moduli());
            total += got;
        }
        assert_eq!(total, *cfg.legitimate_m(), "census covers the code space");
    }
}

#[test]
fn vector_distance_matches_enumeration_up_to_two() {
    // Count the distance-1 and distance-2 perturbations of a word directly.
    let cfg = RrnsConfig::new(&[3, 5], &[7, 11]).unwrap();
    let moduli = cfg.all_moduli();
    let mut v1 = 0u64;
    let mut v2 = 0u64;
    for i in 0..moduli.len() {
        v1 += moduli[i] - 1;
        for j in (i + 1)..moduli.len() {
            v2 += (moduli[i] - 1) * (moduli[j] - 1);
        }
    }
    assert_eq!(cfg.vector_distance(1).unwrap(), BigUint::from(v1));
    assert_eq!(cfg.vector_distance(2).unwrap(), BigUint::from(v2));
    assert_eq!(cfg.vector_distance(0).unwrap(), BigUint::one());
}

#[test]
fn decoder_corrects_all_single_errors_exhaustively() {
    // k = 2 corrects one error: try every value and every wrong residue.
    let cfg = RrnsConfig::new(&[3, 5], &[7, 11]).unwrap();
    let m = cfg.legitimate_m().to_u64().unwrap();
    for v in 0..m {
        let value = BigUint::from(v);
        let clean = cfg.encode(&value).unwrap();
        for pos in 0..cfg.total_moduli() {
            let modulus = cfg.all_moduli()[pos];
            for wrong in 0..modulus {
                if wrong == clean.residues()[pos] {
                    continue;
                }
                let mut residues = clean.residues().to_vec();
                residues[pos] = wrong;
                let word = cfg.codeword_from_residues(residues).unwrap();
                match cfg.majority_decode(&word) {
                    DecodeOutcome::Value { value: got, errors_corrected } => {
                        assert_eq!(got, value, "v={v} pos={pos} wrong={wrong}");
                        assert_eq!(errors_corrected, 1);
                    }
                    DecodeOutcome::DetectedUncorrectable => {
                        panic!("single error on v={v} must be corrected")
                    }
                }
            }
        }
    }
}

#[test]
fn decoder_corrects_within_capability_on_large_code() {
    let cfg = rns6_plus(&[67, 65, 71, 73]); // k = 4, corrects 2
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let m = cfg.legitimate_m().to_u64().unwrap();
    for _ in 0..2_000 {
        let v = BigUint::from(rng.gen_range(0..m));
        let clean = cfg.encode(&v).unwrap();
        let errors = rng.gen_range(0..=cfg.correction_capability());
        let (word, mask) = cfg.inject_exact_errors(&clean, errors, &mut rng);
        let outcome = cfg.majority_decode(&word);
        let flipped = mask.iter().filter(|&&b| b).count();
        match outcome {
            DecodeOutcome::Value { value, errors_corrected } => {
                assert_eq!(value, v);
                assert_eq!(errors_corrected, flipped);
            }
            DecodeOutcome::DetectedUncorrectable => panic!("{flipped} errors must be corrected"),
        }
    }
}

#[test]
fn detect_zone_words_are_never_consistent() {
    // Up to k injected errors never land on a different codeword, so the
    // consistency check always flags them.
    for cfg in [
        RrnsConfig::new(&[3, 5], &[7, 11]).unwrap(),
        rns6_plus(&[67, 65, 71]),
    ] {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = cfg.legitimate_m().to_u64().unwrap();
        for _ in 0..3_000 {
            let v = BigUint::from(rng.gen_range(0..m));
            let clean = cfg.encode(&v).unwrap();
            let errors = rng.gen_range(1..=cfg.detection_capability());
            let (word, _) = cfg.inject_exact_errors(&clean, errors, &mut rng);
            assert!(!cfg.is_codeword(&word), "{errors} errors look consistent");
        }
    }
}

#[test]
fn probability_components_sum_to_one_on_grid() {
    let cfg = rns6_plus(&[67, 65]);
    for i in 0..64 {
        let p = i as f64 / 63.0;
        let probs = cfg.error_probabilities(p);
        assert!(
            (probs.p_c + probs.p_d + probs.p_u - 1.0).abs() < 1e-12,
            "p={p}: sum={}",
            probs.p_c + probs.p_d + probs.p_u
        );
        assert!(probs.p_c >= 0.0 && probs.p_d >= 0.0 && probs.p_u >= 0.0);
    }
}

#[test]
fn retry_curve_is_monotone_and_converges() {
    let cfg = rns6_plus(&[67, 65]);
    for p in [0.001, 0.01, 0.1, 0.3, 0.9] {
        let probs = cfg.error_probabilities(p);
        let mut last = f64::INFINITY;
        for r in 1..=64 {
            let cur = output_error_probability(&probs, Attempts::Finite(r));
            assert!(cur <= last + 1e-15, "p={p} r={r}");
            last = cur;
        }
        let limit = output_error_probability(&probs, Attempts::Infinite);
        // The limit equals the geometric-series closed form to 1e-12 ...
        let series = 1.0 - probs.p_c / (probs.p_c + probs.p_u);
        assert!((limit - series).abs() < 1e-12, "p={p}: {limit} vs {series}");
        // ... and finite-R values approach it from above within the
        // geometric tail p_c * p_d^R / (1 - p_d).
        let r_far = 4000u32;
        let far = output_error_probability(&probs, Attempts::Finite(r_far));
        let tail = probs.p_c * probs.p_d.powi(r_far as i32) / (1.0 - probs.p_d);
        assert!(far >= limit - 1e-12, "p={p}");
        assert!(far - limit <= tail + 1e-12, "p={p}: gap {} tail {tail}", far - limit);
        assert!(limit <= last + 1e-15);
    }
}

#[test]
fn monte_carlo_matches_analytic_single_attempt() {
    // p_err(1) = 1 - p_c holds exactly for the simulated decoder, so the
    // Monte Carlo estimate must sit within 3 binomial deviations.
    let cfg = rns6_plus(&[67, 65]);
    for (i, p) in [0.01, 0.05, 0.1, 0.3].into_iter().enumerate() {
        let probs = cfg.error_probabilities(p);
        let analytic = output_error_probability(&probs, Attempts::Finite(1));
        let est = monte_carlo_p_err(&cfg, p, 1, 60_000, 7000 + i as u64);
        let sigma = (analytic * (1.0 - analytic) / est.trials as f64).sqrt();
        assert!(
            (est.p_err - analytic).abs() <= 3.0 * sigma.max(1e-9),
            "p={p}: mc={} analytic={analytic} sigma={sigma}",
            est.p_err
        );
    }
}

#[test]
fn injection_statistics_match_binomial_mean() {
    let cfg = RrnsConfig::new(&[3, 5], &[7, 11]).unwrap();
    let value = BigUint::from(7u32);
    let clean = cfg.encode(&value).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let trials = 100_000u64;
    let p = 0.1;
    let mut flipped = 0u64;
    for _ in 0..trials {
        let (_, mask) = cfg.inject_residue_errors(&clean, p, &mut rng);
        flipped += mask.iter().filter(|&&b| b).count() as u64;
    }
    let mean = flipped as f64 / trials as f64;
    let expect = 4.0 * p;
    let sigma = (4.0 * p * (1.0 - p) / trials as f64).sqrt();
    assert!(
        (mean - expect).abs() <= 3.0 * sigma,
        "mean {mean} vs {expect} (sigma {sigma})"
    );
}
