//! Arbitrary-precision arithmetic combining RNS digits with a positional
//! number system.
//!
//! A value `Z` is split into base-`M_p` digits, `Z = sum_d z_d * M_p^d`,
//! and every digit is held twice: as residues over the primary moduli
//! (product `M_p`) and over a disjoint secondary set (product `M_s`).
//! After an operation a digit may exceed `M_p`; base-extending its primary
//! remainder to the secondary set and comparing against the stored
//! secondary residues detects the overflow, and the quotient
//! `Q = (z|s - R|s) * M_p^{-1} mod M_s` is carried into the next digit.
//!
//! Digits are unsigned; callers represent signed values by offsetting.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::rns::{ModuliSet, ResidueVector, RnsError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HybridError {
    #[error("value needs more than {digits} base-M_p digits")]
    Overflow { digits: usize },
    #[error("digit {digit} has inconsistent primary/secondary residues")]
    Unnormalized { digit: usize },
    #[error("worst-case digit value {worst} reaches M_p * M_s = {limit}")]
    DigitRangeViolation { worst: BigUint, limit: BigUint },
    #[error("operand lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("hybrid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Rns(#[from] RnsError),
}

/// Primary and secondary moduli sets with the precomputed inverse of
/// `M_p` modulo each secondary modulus (and modulo `M_s` as a whole).
#[derive(Debug, Clone)]
pub struct HybridConfig {
    primary: ModuliSet,
    secondary: ModuliSet,
    mp_inv_per_secondary: Vec<u64>,
    combined: BigUint,
}

impl HybridConfig {
    pub fn new(primary: &[u64], secondary: &[u64]) -> Result<Self, HybridError> {
        if primary.is_empty() || secondary.is_empty() {
            return Err(HybridError::InvalidConfig(
                "need at least one primary and one secondary modulus".into(),
            ));
        }
        // Joint co-primality across both sets.
        let all: Vec<u64> = primary.iter().chain(secondary).copied().collect();
        ModuliSet::new(&all)?;
        let primary = ModuliSet::new(primary)?;
        let secondary = ModuliSet::new(secondary)?;
        let mp_inv_per_secondary = secondary
            .moduli()
            .iter()
            .map(|&m| {
                let mp_mod = (primary.product() % m).to_u64().expect("fits u64");
                mod_inverse_u64(mp_mod, m).expect("M_p co-prime to secondary modulus")
            })
            .collect();
        let combined = primary.product() * secondary.product();
        Ok(Self { primary, secondary, mp_inv_per_secondary, combined })
    }

    pub fn primary(&self) -> &ModuliSet {
        &self.primary
    }

    pub fn secondary(&self) -> &ModuliSet {
        &self.secondary
    }

    /// `M_p * M_s`: the range a single raw digit's dual encoding can hold.
    pub fn combined_range(&self) -> &BigUint {
        &self.combined
    }
}

fn mod_inverse_u64(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    (old_r == 1).then(|| old_s.rem_euclid(m as i128) as u64)
}

/// One digit: the same integer held under primary and secondary residues.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridDigit {
    primary: ResidueVector,
    secondary: ResidueVector,
}

/// Little-endian digit sequence; `value = sum_d z_d * M_p^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridNumber {
    digits: Vec<HybridDigit>,
}

impl HybridNumber {
    pub fn digit_count(&self) -> usize {
        self.digits.len()
    }

    /// Value of digit `d` as recovered from its primary residues.
    pub fn digit_value(&self, d: usize, cfg: &HybridConfig) -> BigUint {
        cfg.primary
            .crt_reconstruct_unsigned(&self.digits[d].primary)
            .expect("digit belongs to the config's primary set")
    }
}

/// Dual-encodes raw digit values (each below `M_p * M_s`); the result may
/// need [`normalize_digits`] before positional evaluation.
pub fn raw_from_values(values: &[BigUint], cfg: &HybridConfig) -> Result<HybridNumber, HybridError> {
    let digits = values
        .iter()
        .map(|v| {
            if v >= cfg.combined_range() {
                return Err(HybridError::DigitRangeViolation {
                    worst: v.clone(),
                    limit: cfg.combined_range().clone(),
                });
            }
            Ok(HybridDigit {
                primary: cfg.primary.residues_unsigned(v),
                secondary: cfg.secondary.residues_unsigned(v),
            })
        })
        .collect::<Result<_, _>>()?;
    Ok(HybridNumber { digits })
}

/// Base-`M_p` decomposition of `Z < M_p^digit_count`, every digit
/// dual-encoded.
pub fn to_hybrid(value: &BigUint, digit_count: usize, cfg: &HybridConfig) -> Result<HybridNumber, HybridError> {
    assert!(digit_count >= 1);
    let m_p = cfg.primary.product();
    if *value >= m_p.pow(digit_count as u32) {
        return Err(HybridError::Overflow { digits: digit_count });
    }
    let mut rest = value.clone();
    let mut digits = Vec::with_capacity(digit_count);
    for _ in 0..digit_count {
        let (q, r) = num_integer::Integer::div_rem(&rest, m_p);
        digits.push(HybridDigit {
            primary: cfg.primary.residues_unsigned(&r),
            secondary: cfg.secondary.residues_unsigned(&r),
        });
        rest = q;
    }
    Ok(HybridNumber { digits })
}

/// Exact inverse of [`to_hybrid`] for normalized numbers.
pub fn from_hybrid(x: &HybridNumber, cfg: &HybridConfig) -> Result<BigUint, HybridError> {
    let m_p = cfg.primary.product();
    let mut acc = BigUint::zero();
    let mut weight = BigUint::one();
    for (d, digit) in x.digits.iter().enumerate() {
        let vp = cfg.primary.crt_reconstruct_unsigned(&digit.primary)?;
        let extended = cfg.secondary.residues_unsigned(&vp);
        if extended.residues() != digit.secondary.residues() {
            return Err(HybridError::Unnormalized { digit: d });
        }
        acc += &vp * &weight;
        weight *= m_p;
    }
    Ok(acc)
}

/// Residues of the same integer under a different moduli set, computed by
/// CRT reconstruction over the source set followed by reduction.
pub fn base_extend(
    rv: &ResidueVector,
    source: &ModuliSet,
    target: &ModuliSet,
) -> Result<ResidueVector, HybridError> {
    let value = source.crt_reconstruct_unsigned(rv)?;
    Ok(target.residues_unsigned(&value))
}

/// Normalizes possibly-overflowing digits by overflow detection and carry
/// propagation:
///
/// 1. add the incoming carry to the digit (both residue sets),
/// 2. `R|p = z|p`, `R|s = p2s(R|p)`,
/// 3. if `R|s` equals the stored secondary residues the digit holds `R`
///    and the carry is zero; otherwise the quotient
///    `Q|s = (z|s - R|s) * M_p^{-1}` is recovered per secondary modulus,
///    mapped back by `s2p`, and carried into the next digit.
///
/// A nonzero carry past the last digit appends new digits.
pub fn normalize_digits(x: &HybridNumber, cfg: &HybridConfig) -> Result<HybridNumber, HybridError> {
    let n_s = cfg.secondary.len();
    let sec_moduli = cfg.secondary.moduli();
    let mut out = Vec::with_capacity(x.digits.len() + 1);
    let mut carry_p = cfg.primary.residues_unsigned(&BigUint::zero());
    let mut carry_s = cfg.secondary.residues_unsigned(&BigUint::zero());
    let mut carry_nonzero = false;
    let mut d = 0;
    loop {
        let (zp, zs) = if d < x.digits.len() {
            let digit = &x.digits[d];
            (
                cfg.primary.residue_add(&digit.primary, &carry_p)?,
                cfg.secondary.residue_add(&digit.secondary, &carry_s)?,
            )
        } else if carry_nonzero {
            (carry_p.clone(), carry_s.clone())
        } else {
            break;
        };

        let remainder_s = base_extend(&zp, &cfg.primary, &cfg.secondary)?;
        if remainder_s.residues() == zs.residues() {
            carry_p = cfg.primary.residues_unsigned(&BigUint::zero());
            carry_s = cfg.secondary.residues_unsigned(&BigUint::zero());
            carry_nonzero = false;
        } else {
            let q_res: Vec<u64> = zs
                .residues()
                .iter()
                .zip(remainder_s.residues())
                .zip(cfg.mp_inv_per_secondary.iter().zip(sec_moduli))
                .map(|((&z, &r), (&inv, &m))| {
                    let diff = (z + m - r) % m;
                    ((diff as u128 * inv as u128) % m as u128) as u64
                })
                .collect();
            debug_assert_eq!(q_res.len(), n_s);
            carry_s = cfg.secondary.vector_from_residues(q_res)?;
            carry_p = base_extend(&carry_s, &cfg.secondary, &cfg.primary)?;
            carry_nonzero = true;
        }
        out.push(HybridDigit { primary: zp, secondary: remainder_s });
        d += 1;
    }
    Ok(HybridNumber { digits: out })
}

/// Guards the dual-encoding precondition: the largest raw digit an
/// operation can accumulate, plus its worst carry, must stay below
/// `M_p * M_s`.
fn check_digit_budget(worst_raw: BigUint, cfg: &HybridConfig) -> Result<(), HybridError> {
    let m_p = cfg.primary.product();
    // Carry fixpoint bound: c <= raw / (M_p - 1) + 1.
    let carry_bound = &worst_raw / (m_p - 1u8) + 1u8;
    let worst = &worst_raw + &carry_bound;
    if worst >= *cfg.combined_range() {
        return Err(HybridError::DigitRangeViolation {
            worst,
            limit: cfg.combined_range().clone(),
        });
    }
    Ok(())
}

/// Digit-wise residue addition followed by one normalization pass. The
/// result auto-extends by one digit when the top carry is nonzero.
pub fn hybrid_add(a: &HybridNumber, b: &HybridNumber, cfg: &HybridConfig) -> Result<HybridNumber, HybridError> {
    check_digit_budget((cfg.primary.product() - 1u8) * 2u8, cfg)?;
    let len = a.digits.len().max(b.digits.len());
    let zero = HybridDigit {
        primary: cfg.primary.residues_unsigned(&BigUint::zero()),
        secondary: cfg.secondary.residues_unsigned(&BigUint::zero()),
    };
    let mut raw = Vec::with_capacity(len);
    for d in 0..len {
        let x = a.digits.get(d).unwrap_or(&zero);
        let y = b.digits.get(d).unwrap_or(&zero);
        raw.push(HybridDigit {
            primary: cfg.primary.residue_add(&x.primary, &y.primary)?,
            secondary: cfg.secondary.residue_add(&x.secondary, &y.secondary)?,
        });
    }
    normalize_digits(&HybridNumber { digits: raw }, cfg)
}

/// Long multiplication in residue space: digit convolution, then one
/// normalization pass. Output has `D_x + D_y` digits before trailing
/// carries.
pub fn hybrid_mul(a: &HybridNumber, b: &HybridNumber, cfg: &HybridConfig) -> Result<HybridNumber, HybridError> {
    let d_x = a.digits.len();
    let d_y = b.digits.len();
    let m_p_minus_1 = cfg.primary.product() - 1u8;
    check_digit_budget(
        BigUint::from(d_x.min(d_y) as u64) * &m_p_minus_1 * &m_p_minus_1,
        cfg,
    )?;
    let raw = convolve(std::slice::from_ref(&(a, b)), d_x + d_y, cfg)?;
    normalize_digits(&HybridNumber { digits: raw }, cfg)
}

/// Dot product of hybrid vectors: all digit convolutions accumulate in
/// residue space and a single normalization pass resolves carries. The
/// result needs at most `D_x + D_y + ceil(log2 h)` digits.
pub fn hybrid_dot(
    xs: &[HybridNumber],
    ys: &[HybridNumber],
    cfg: &HybridConfig,
) -> Result<HybridNumber, HybridError> {
    if xs.len() != ys.len() {
        return Err(HybridError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.is_empty() {
        return Ok(to_hybrid(&BigUint::zero(), 1, cfg).expect("zero fits"));
    }
    let d_x = xs.iter().map(|x| x.digits.len()).max().unwrap();
    let d_y = ys.iter().map(|y| y.digits.len()).max().unwrap();
    let h = xs.len() as u64;
    let m_p_minus_1 = cfg.primary.product() - 1u8;
    check_digit_budget(
        BigUint::from(h * d_x.min(d_y) as u64) * &m_p_minus_1 * &m_p_minus_1,
        cfg,
    )?;
    let pairs: Vec<(&HybridNumber, &HybridNumber)> = xs.iter().zip(ys).collect();
    let raw = convolve(&pairs, d_x + d_y, cfg)?;
    normalize_digits(&HybridNumber { digits: raw }, cfg)
}

fn convolve(
    pairs: &[(&HybridNumber, &HybridNumber)],
    out_digits: usize,
    cfg: &HybridConfig,
) -> Result<Vec<HybridDigit>, HybridError> {
    let p_mods = cfg.primary.moduli();
    let s_mods = cfg.secondary.moduli();
    let mut acc_p = vec![vec![0u64; p_mods.len()]; out_digits];
    let mut acc_s = vec![vec![0u64; s_mods.len()]; out_digits];
    for (x, y) in pairs {
        for (i, xd) in x.digits.iter().enumerate() {
            for (j, yd) in y.digits.iter().enumerate() {
                let slot = i + j;
                for ((acc, &m), (&a, &b)) in acc_p[slot]
                    .iter_mut()
                    .zip(p_mods)
                    .zip(xd.primary.residues().iter().zip(yd.primary.residues()))
                {
                    *acc = ((*acc as u128 + a as u128 * b as u128) % m as u128) as u64;
                }
                for ((acc, &m), (&a, &b)) in acc_s[slot]
                    .iter_mut()
                    .zip(s_mods)
                    .zip(xd.secondary.residues().iter().zip(yd.secondary.residues()))
                {
                    *acc = ((*acc as u128 + a as u128 * b as u128) % m as u128) as u64;
                }
            }
        }
    }
    acc_p
        .into_iter()
        .zip(acc_s)
        .map(|(p, s)| {
            Ok(HybridDigit {
                primary: cfg.primary.vector_from_residues(p)?,
                secondary: cfg.secondary.vector_from_residues(s)?,
            })
        })
        .collect()
}
