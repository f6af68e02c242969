//! Redundant residue number system codes RRNS(n+k, n).
//!
//! An RRNS code extends `n` information moduli with `k` redundant ones.
//! Values in the legitimate range `[0, M)` (with `M` the product of the
//! `n` information moduli) are encoded against all `n+k` moduli. The code
//! has minimum Hamming distance `k + 1`; majority-logic decoding corrects
//! up to `floor(k/2)` erroneous residues.
//!
//! The module also implements the analytical error-probability model
//! (vector-space and code-space distance distributions, correctable /
//! detectable / undetectable probabilities, and the retry curve) plus a
//! Monte Carlo oracle for it.

use std::collections::HashMap;
use std::str::FromStr;

use itertools::Itertools;
use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::binomial;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::rns::{ModuliSet, RnsError};
use crate::seed;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RrnsError {
    #[error("value lies outside the legitimate range [0, {legitimate_m})")]
    OutOfLegitimateRange { legitimate_m: BigUint },
    #[error("codeword has {got} residues, code expects {want}")]
    CodewordLength { got: usize, want: usize },
    #[error("eta {eta} outside valid range {min}..={max}")]
    EtaRange { eta: usize, min: usize, max: usize },
    #[error(transparent)]
    Rns(#[from] RnsError),
}

/// Code parameters plus the per-group CRT tables used by the decoder.
#[derive(Debug, Clone)]
pub struct RrnsConfig {
    non_redundant: Vec<u64>,
    redundant: Vec<u64>,
    full_set: ModuliSet,
    legitimate_m: BigUint,
    groups: Vec<DecodeGroup>,
}

#[derive(Debug, Clone)]
struct DecodeGroup {
    member_indices: Vec<usize>,
    set: ModuliSet,
}

/// An (n+k)-residue word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codeword {
    residues: Vec<u64>,
}

impl Codeword {
    pub fn residues(&self) -> &[u64] {
        &self.residues
    }
}

/// Decoder verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodeOutcome {
    /// Accepted value with the number of residues that were corrected
    /// (the Hamming distance between the received word and the accepted
    /// codeword, at most `floor(k/2)`).
    Value { value: BigUint, errors_corrected: usize },
    /// No candidate within the correction radius.
    DetectedUncorrectable,
}

impl RrnsConfig {
    pub fn new(non_redundant: &[u64], redundant: &[u64]) -> Result<Self, RrnsError> {
        assert!(!non_redundant.is_empty(), "need at least one information modulus");
        let all: Vec<u64> = non_redundant.iter().chain(redundant).copied().collect();
        let full_set = ModuliSet::new(&all)?;
        let legitimate_m: BigUint = non_redundant.iter().map(|&m| BigUint::from(m)).product();
        let n = non_redundant.len();
        let groups = (0..all.len())
            .combinations(n)
            .map(|member_indices| {
                let moduli: Vec<u64> = member_indices.iter().map(|&i| all[i]).collect();
                let set = ModuliSet::new(&moduli).expect("subset of co-prime moduli");
                DecodeGroup { member_indices, set }
            })
            .collect();
        Ok(Self {
            non_redundant: non_redundant.to_vec(),
            redundant: redundant.to_vec(),
            full_set,
            legitimate_m,
            groups,
        })
    }

    pub fn n(&self) -> usize {
        self.non_redundant.len()
    }

    pub fn k(&self) -> usize {
        self.redundant.len()
    }

    pub fn total_moduli(&self) -> usize {
        self.n() + self.k()
    }

    pub fn all_moduli(&self) -> &[u64] {
        self.full_set.moduli()
    }

    pub fn non_redundant(&self) -> &[u64] {
        &self.non_redundant
    }

    pub fn redundant(&self) -> &[u64] {
        &self.redundant
    }

    /// Product of the information moduli; valid codewords encode `[0, M)`.
    pub fn legitimate_m(&self) -> &BigUint {
        &self.legitimate_m
    }

    /// `floor(k/2)`.
    pub fn correction_capability(&self) -> usize {
        self.k() / 2
    }

    /// `k`: up to this many erroneous residues are always inconsistent.
    pub fn detection_capability(&self) -> usize {
        self.k()
    }

    pub fn encode(&self, value: &BigUint) -> Result<Codeword, RrnsError> {
        if value >= &self.legitimate_m {
            return Err(RrnsError::OutOfLegitimateRange {
                legitimate_m: self.legitimate_m.clone(),
            });
        }
        let rv = self.full_set.residues_unsigned(value);
        Ok(Codeword { residues: rv.residues().to_vec() })
    }

    pub fn codeword_from_residues(&self, residues: Vec<u64>) -> Result<Codeword, RrnsError> {
        if residues.len() != self.total_moduli() {
            return Err(RrnsError::CodewordLength {
                got: residues.len(),
                want: self.total_moduli(),
            });
        }
        // Range validation reuses the moduli-set checks.
        self.full_set.vector_from_residues(residues.clone())?;
        Ok(Codeword { residues })
    }

    /// True when the word is consistent, i.e. its full-set reconstruction
    /// lies in the legitimate range.
    pub fn is_codeword(&self, cw: &Codeword) -> bool {
        let rv = self
            .full_set
            .vector_from_residues(cw.residues.clone())
            .expect("codeword shape already validated");
        let raw = self.full_set.crt_reconstruct_unsigned(&rv).expect("owned vector");
        raw < self.legitimate_m
    }

    /// Majority-logic decoding. Every group of `n` residues reconstructs a
    /// candidate; candidates at or above the legitimate range are discarded;
    /// the plurality winner is accepted iff re-encoding it lands within
    /// Hamming distance `floor(k/2)` of the received word. Vote ties break
    /// toward the smaller value so decoding is deterministic.
    pub fn majority_decode(&self, cw: &Codeword) -> DecodeOutcome {
        assert_eq!(cw.residues.len(), self.total_moduli(), "codeword shape");
        let mut votes: HashMap<BigUint, usize> = HashMap::new();
        for group in &self.groups {
            let residues: Vec<u64> = group.member_indices.iter().map(|&i| cw.residues[i]).collect();
            let rv = group
                .set
                .vector_from_residues(residues)
                .expect("group residues are reduced");
            let value = group.set.crt_reconstruct_unsigned(&rv).expect("owned vector");
            if value < self.legitimate_m {
                *votes.entry(value).or_insert(0) += 1;
            }
        }
        let Some((winner, _)) = votes
            .into_iter()
            .max_by(|(va, ca), (vb, cb)| ca.cmp(cb).then_with(|| vb.cmp(va)))
        else {
            return DecodeOutcome::DetectedUncorrectable;
        };
        let reencoded = self.encode(&winner).expect("winner is in range");
        let dist = hamming(&reencoded.residues, &cw.residues);
        if dist <= self.correction_capability() {
            DecodeOutcome::Value { value: winner, errors_corrected: dist }
        } else {
            DecodeOutcome::DetectedUncorrectable
        }
    }

    /// Flips each residue independently with probability `p` to a uniformly
    /// random different value. Returns the perturbed word and the mask of
    /// flipped positions.
    pub fn inject_residue_errors(
        &self,
        cw: &Codeword,
        p: f64,
        rng: &mut impl Rng,
    ) -> (Codeword, Vec<bool>) {
        assert!((0.0..=1.0).contains(&p), "p must be a probability");
        let mut residues = cw.residues.clone();
        let mut mask = vec![false; residues.len()];
        for (i, &m) in self.all_moduli().iter().enumerate() {
            if rng.gen_bool(p) {
                residues[i] = random_wrong_residue(residues[i], m, rng);
                mask[i] = true;
            }
        }
        (Codeword { residues }, mask)
    }

    /// Flips exactly `count` distinct residues to uniformly random wrong
    /// values. Used by decoder-guarantee experiments.
    pub fn inject_exact_errors(
        &self,
        cw: &Codeword,
        count: usize,
        rng: &mut impl Rng,
    ) -> (Codeword, Vec<bool>) {
        let total = self.total_moduli();
        assert!(count <= total);
        let mut residues = cw.residues.clone();
        let mut mask = vec![false; total];
        let positions = rand::seq::index::sample(rng, total, count);
        for i in positions {
            let m = self.all_moduli()[i];
            residues[i] = random_wrong_residue(residues[i], m, rng);
            mask[i] = true;
        }
        (Codeword { residues }, mask)
    }

    /// `V_eta`: number of vectors at Hamming distance `eta` from a codeword,
    /// the elementary symmetric sum of `(m_i - 1)` over all selections of
    /// `eta` moduli.
    pub fn vector_distance(&self, eta: usize) -> Result<BigUint, RrnsError> {
        let total = self.total_moduli();
        if eta > total {
            return Err(RrnsError::EtaRange { eta, min: 0, max: total });
        }
        // Coefficients of prod_i (1 + (m_i - 1) x).
        let mut coeffs = vec![BigUint::zero(); total + 1];
        coeffs[0] = BigUint::one();
        for (i, &m) in self.all_moduli().iter().enumerate() {
            let w = BigUint::from(m - 1);
            for d in (1..=i + 1).rev() {
                let add = &coeffs[d - 1] * &w;
                coeffs[d] += add;
            }
        }
        Ok(coeffs[eta].clone())
    }

    /// `zeta(n+k, eta)`: sum over all selections of `n+k-eta` moduli of
    /// `floor((M - 1) / prod selected)`, `M` being the legitimate range.
    pub fn zeta(&self, eta: usize) -> Result<BigUint, RrnsError> {
        let total = self.total_moduli();
        if eta < 1 || eta > total {
            return Err(RrnsError::EtaRange { eta, min: 1, max: total });
        }
        let select = total - eta;
        let m_minus_1 = &self.legitimate_m - 1u8;
        let mut acc = BigUint::zero();
        for combo in (0..total).combinations(select) {
            let divisor: BigUint = combo.iter().map(|&i| BigUint::from(self.all_moduli()[i])).product();
            acc += &m_minus_1 / divisor;
        }
        Ok(acc)
    }

    /// `D_eta`: number of codewords at Hamming distance `eta` from the zero
    /// codeword. Zero for `1 <= eta <= k` (the minimum distance is `k + 1`).
    pub fn code_distance(&self, eta: usize) -> Result<BigUint, RrnsError> {
        let total = self.total_moduli();
        let k = self.k();
        if eta > total {
            return Err(RrnsError::EtaRange { eta, min: 0, max: total });
        }
        if eta == 0 {
            return Ok(BigUint::one());
        }
        if eta <= k {
            return Ok(BigUint::zero());
        }
        let mut acc = BigInt::zero();
        for h in 0..=(eta - 1 - k) {
            let coeff = binomial(BigUint::from(total - eta + h), BigUint::from(total - eta));
            let term = BigInt::from(coeff) * BigInt::from(self.zeta(eta - h)?);
            if h % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        debug_assert!(!acc.is_negative(), "distance count cannot be negative");
        Ok(acc.to_biguint().expect("non-negative"))
    }

    /// `p_E(eta) = C(n+k, eta) p^eta (1-p)^(n+k-eta)`.
    pub fn prob_eta_errors(&self, eta: usize, p: f64) -> f64 {
        assert!((0.0..=1.0).contains(&p));
        let total = self.total_moduli();
        assert!(eta <= total);
        let c = binomial(BigUint::from(total), BigUint::from(eta))
            .to_f64()
            .expect("binomial fits f64 at desk scale");
        c * p.powi(eta as i32) * (1.0 - p).powi((total - eta) as i32)
    }

    /// Closed-form correctable / detectable / undetectable probabilities.
    pub fn error_probabilities(&self, p: f64) -> ErrorProbabilities {
        let total = self.total_moduli();
        let k = self.k();
        let p_c: f64 = (0..=self.correction_capability())
            .map(|eta| self.prob_eta_errors(eta, p))
            .sum();
        let mut p_u = 0.0;
        for eta in (k + 1)..=total {
            let d = self.code_distance(eta).expect("eta in range").to_f64().unwrap_or(0.0);
            if d == 0.0 {
                continue;
            }
            let v = self.vector_distance(eta).expect("eta in range").to_f64().unwrap_or(f64::MAX);
            p_u += d / v * self.prob_eta_errors(eta, p);
        }
        let p_d = (1.0 - p_c - p_u).max(0.0);
        ErrorProbabilities { p_c, p_d, p_u }
    }
}

fn hamming(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

fn random_wrong_residue(original: u64, modulus: u64, rng: &mut impl Rng) -> u64 {
    let draw = rng.gen_range(0..modulus - 1);
    if draw >= original {
        draw + 1
    } else {
        draw
    }
}

/// Single-attempt outcome probabilities; sums to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorProbabilities {
    pub p_c: f64,
    pub p_d: f64,
    pub p_u: f64,
}

/// Retry budget for the decode-and-recompute loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Attempts {
    Finite(u32),
    Infinite,
}

impl FromStr for Attempts {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("inf") {
            return Ok(Attempts::Infinite);
        }
        s.parse::<u32>()
            .map(Attempts::Finite)
            .map_err(|_| format!("attempts must be a positive integer or \"inf\", got {s:?}"))
    }
}

impl std::fmt::Display for Attempts {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Attempts::Finite(r) => write!(f, "{r}"),
            Attempts::Infinite => write!(f, "inf"),
        }
    }
}

/// `p_err(R) = 1 - p_c * sum_{r<R} p_d^r`; the infinite-retry limit is
/// `p_u / (p_u + p_c)`, computed in closed form rather than by looping.
pub fn output_error_probability(probs: &ErrorProbabilities, attempts: Attempts) -> f64 {
    match attempts {
        Attempts::Finite(r) => {
            assert!(r >= 1, "at least one attempt");
            let mut geo_sum = 0.0;
            let mut term = 1.0;
            for _ in 0..r {
                geo_sum += term;
                term *= probs.p_d;
            }
            (1.0 - probs.p_c * geo_sum).clamp(0.0, 1.0)
        }
        Attempts::Infinite => {
            let denom = probs.p_u + probs.p_c;
            if denom <= 0.0 {
                1.0
            } else {
                probs.p_u / denom
            }
        }
    }
}

/// Monte Carlo estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub p_err: f64,
    pub std_err: f64,
    pub trials: u64,
    pub wrong_value: u64,
    pub exhausted: u64,
}

/// Simulates encode -> inject -> decode with up to `attempts` full retries
/// while the decode reports a detected-uncorrectable word. An output is
/// incorrect when a wrong value is accepted or every attempt is exhausted.
/// Trials are seeded per index, so the estimate is independent of the
/// parallel schedule.
pub fn monte_carlo_p_err(
    cfg: &RrnsConfig,
    p: f64,
    attempts: u32,
    trials: u64,
    seed: u64,
) -> McEstimate {
    assert!(trials >= 1);
    assert!(attempts >= 1);
    let (wrong, exhausted) = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(seed, i));
            let value = rng.gen_biguint_below(cfg.legitimate_m());
            let clean = cfg.encode(&value).expect("value in range");
            for _ in 0..attempts {
                let (word, _) = cfg.inject_residue_errors(&clean, p, &mut rng);
                match cfg.majority_decode(&word) {
                    DecodeOutcome::Value { value: got, .. } => {
                        return if got == value { (0u64, 0u64) } else { (1, 0) };
                    }
                    DecodeOutcome::DetectedUncorrectable => continue,
                }
            }
            (0, 1)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let incorrect = wrong + exhausted;
    let p_hat = incorrect as f64 / trials as f64;
    McEstimate {
        p_err: p_hat,
        std_err: (p_hat * (1.0 - p_hat) / trials as f64).sqrt(),
        trials,
        wrong_value: wrong,
        exhausted,
    }
}

/// Empirical single-attempt trichotomy (correct / detected / wrong value).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McProbabilities {
    pub p_c: f64,
    pub p_d: f64,
    pub p_u: f64,
    pub trials: u64,
}

pub fn monte_carlo_probabilities(cfg: &RrnsConfig, p: f64, trials: u64, seed: u64) -> McProbabilities {
    assert!(trials >= 1);
    let (correct, detected, wrong) = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(seed, i));
            let value = rng.gen_biguint_below(cfg.legitimate_m());
            let clean = cfg.encode(&value).expect("value in range");
            let (word, _) = cfg.inject_residue_errors(&clean, p, &mut rng);
            match cfg.majority_decode(&word) {
                DecodeOutcome::Value { value: got, .. } if got == value => (1u64, 0u64, 0u64),
                DecodeOutcome::Value { .. } => (0, 0, 1),
                DecodeOutcome::DetectedUncorrectable => (0, 1, 0),
            }
        })
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let t = trials as f64;
    McProbabilities {
        p_c: correct as f64 / t,
        p_d: detected as f64 / t,
        p_u: wrong as f64 / t,
        trials,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_code() -> RrnsConfig {
        RrnsConfig::new(&[3, 5], &[7, 11]).unwrap()
    }

    #[test]
    fn config_invariants() {
        let cfg = small_code();
        assert_eq!(*cfg.legitimate_m(), BigUint::from(15u32));
        assert_eq!(cfg.correction_capability(), 1);
        assert_eq!(cfg.detection_capability(), 2);
        assert_eq!(cfg.total_moduli(), 4);
        assert!(RrnsConfig::new(&[3, 5], &[6]).is_err());
    }

    #[test]
    fn encode_examples() {
        let cfg = small_code();
        let cw = cfg.encode(&BigUint::from(7u32)).unwrap();
        assert_eq!(cw.residues(), &[1, 2, 0, 7]);
        let zero = cfg.encode(&BigUint::zero()).unwrap();
        assert_eq!(zero.residues(), &[0, 0, 0, 0]);
        assert!(matches!(
            cfg.encode(&BigUint::from(15u32)),
            Err(RrnsError::OutOfLegitimateRange { .. })
        ));
    }

    #[test]
    fn decode_clean_codeword() {
        let cfg = small_code();
        let cw = cfg.encode(&BigUint::from(7u32)).unwrap();
        assert_eq!(
            cfg.majority_decode(&cw),
            DecodeOutcome::Value { value: BigUint::from(7u32), errors_corrected: 0 }
        );
    }

    #[test]
    fn decode_corrects_single_error() {
        let cfg = small_code();
        let cw = cfg.codeword_from_residues(vec![1, 2, 5, 7]).unwrap();
        assert_eq!(
            cfg.majority_decode(&cw),
            DecodeOutcome::Value { value: BigUint::from(7u32), errors_corrected: 1 }
        );
    }

    #[test]
    fn decode_detects_double_error() {
        let cfg = small_code();
        let cw = cfg.codeword_from_residues(vec![1, 4, 5, 7]).unwrap();
        assert_eq!(cfg.majority_decode(&cw), DecodeOutcome::DetectedUncorrectable);
    }

    #[test]
    fn inject_edge_probabilities() {
        let cfg = small_code();
        let cw = cfg.encode(&BigUint::from(7u32)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (same, mask) = cfg.inject_residue_errors(&cw, 0.0, &mut rng);
        assert_eq!(same, cw);
        assert!(mask.iter().all(|&b| !b));
        let (diff, mask) = cfg.inject_residue_errors(&cw, 1.0, &mut rng);
        assert!(mask.iter().all(|&b| b));
        assert!(diff.residues().iter().zip(cw.residues()).all(|(a, b)| a != b));
    }

    #[test]
    fn vector_distance_examples() {
        let cfg = RrnsConfig::new(&[3, 5], &[7]).unwrap();
        assert_eq!(cfg.vector_distance(0).unwrap(), BigUint::one());
        assert_eq!(cfg.vector_distance(1).unwrap(), BigUint::from(12u32));
        assert_eq!(cfg.vector_distance(3).unwrap(), BigUint::from(48u32));
    }

    #[test]
    fn zeta_examples() {
        let cfg = RrnsConfig::new(&[3, 5], &[7]).unwrap();
        assert_eq!(cfg.zeta(2).unwrap(), BigUint::from(8u32));
        assert_eq!(cfg.zeta(3).unwrap(), BigUint::from(14u32));
        assert_eq!(cfg.zeta(1).unwrap(), BigUint::zero());
    }

    #[test]
    fn code_distance_examples() {
        let cfg = RrnsConfig::new(&[3, 5], &[7]).unwrap();
        assert_eq!(cfg.code_distance(1).unwrap(), BigUint::zero());
        assert_eq!(cfg.code_distance(2).unwrap(), BigUint::from(8u32));
        assert_eq!(cfg.code_distance(3).unwrap(), BigUint::from(6u32));
        let total: BigUint = (0..=3).map(|e| cfg.code_distance(e).unwrap()).sum();
        assert_eq!(total, *cfg.legitimate_m());
    }

    #[test]
    fn prob_eta_examples() {
        let cfg = small_code();
        let p = 0.3;
        assert!((cfg.prob_eta_errors(0, p) - (1.0 - p).powi(4)).abs() < 1e-15);
        let total: f64 = (0..=4).map(|e| cfg.prob_eta_errors(e, p)).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!((cfg.prob_eta_errors(2, 0.1) - 0.0486).abs() < 1e-12);
    }

    #[test]
    fn error_probabilities_closed_form() {
        let cfg = RrnsConfig::new(&[3, 5], &[7]).unwrap();
        let probs = cfg.error_probabilities(0.0);
        assert_eq!((probs.p_c, probs.p_d, probs.p_u), (1.0, 0.0, 0.0));

        let probs = cfg.error_probabilities(0.1);
        assert!((probs.p_c - 0.729).abs() < 1e-12);
        assert!((probs.p_u - 5.0340909090909e-3).abs() < 1e-12);
        assert!((probs.p_d - (1.0 - 0.729 - 5.0340909090909e-3)).abs() < 1e-12);
    }

    #[test]
    fn k_zero_collapses_to_detectionless_code() {
        let cfg = RrnsConfig::new(&[3, 5], &[]).unwrap();
        let p = 0.2;
        let probs = cfg.error_probabilities(p);
        assert!((probs.p_c - (1.0 - p) * (1.0 - p)).abs() < 1e-12);
        assert!((probs.p_c + probs.p_u - 1.0).abs() < 1e-12);
        assert!(probs.p_d.abs() < 1e-12);
    }

    #[test]
    fn output_error_probability_examples() {
        let probs = ErrorProbabilities { p_c: 0.9, p_d: 0.09, p_u: 0.01 };
        assert!((output_error_probability(&probs, Attempts::Finite(1)) - 0.1).abs() < 1e-12);
        assert!((output_error_probability(&probs, Attempts::Finite(2)) - 0.019).abs() < 1e-12);
        assert!((output_error_probability(&probs, Attempts::Infinite) - 0.01 / 0.91).abs() < 1e-12);
    }

    #[test]
    fn attempts_parsing() {
        assert_eq!("inf".parse::<Attempts>().unwrap(), Attempts::Infinite);
        assert_eq!("3".parse::<Attempts>().unwrap(), Attempts::Finite(3));
        assert!("never".parse::<Attempts>().is_err());
        assert_eq!(Attempts::Infinite.to_string(), "inf");
    }

    #[test]
    fn monte_carlo_edge_cases() {
        let cfg = small_code();
        let est = monte_carlo_p_err(&cfg, 0.0, 1, 2000, 9);
        assert_eq!(est.p_err, 0.0);
        // p = 1: every attempt carries four errors, so no output is correct.
        let est = monte_carlo_p_err(&cfg, 1.0, 2, 2000, 9);
        assert_eq!(est.p_err, 1.0);
    }

    #[test]
    fn monte_carlo_is_schedule_independent() {
        let cfg = small_code();
        let a = monte_carlo_p_err(&cfg, 0.05, 1, 5000, 3);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| monte_carlo_p_err(&cfg, 0.05, 1, 5000, 3));
        assert_eq!(a, b);
    }
}
