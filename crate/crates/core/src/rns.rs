//! Exact residue-number-system arithmetic.
//!
//! An integer `A` is represented by its remainders against a set of
//! pairwise co-prime moduli `{m_1, ..., m_n}`. Addition and multiplication
//! act independently per residue, and `A` is recovered from the residues by
//! the Chinese remainder theorem as `A = |sum_i a_i * M_i * T_i|_M` with
//! `M = prod m_i`, `M_i = M / m_i` and `T_i` the multiplicative inverse of
//! `M_i` modulo `m_i`.
//!
//! Signed values live in `[-psi, psi]` with `psi = floor((M-1)/2)`:
//! residue classes above `psi` reconstruct to `raw - M`.

use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RnsError {
    #[error("modulus {0} is smaller than 2")]
    InvalidModulus(u64),
    #[error("moduli {0} and {1} share a common factor")]
    NotCoprime(u64, u64),
    #[error("value magnitude exceeds the signed range of the moduli set (psi = {psi})")]
    OutOfRange { psi: BigUint },
    #[error("residue vector belongs to a different moduli set")]
    ModuliMismatch,
    #[error("operand lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("residue {value} is not reduced modulo {modulus}")]
    ResidueRange { value: u64, modulus: u64 },
}

/// Smallest number of bits that can hold `h` distinct left-shift positions,
/// i.e. `ceil(log2(h))`. `h = 1` maps to 0.
pub(crate) fn ceil_log2(h: u64) -> u32 {
    assert!(h >= 1, "ceil_log2 requires h >= 1");
    if h == 1 {
        0
    } else {
        64 - (h - 1).leading_zeros()
    }
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

static NEXT_SET_ID: AtomicU64 = AtomicU64::new(1);

/// A validated set of pairwise co-prime moduli with precomputed CRT
/// constants. Immutable after construction and safe to share across
/// threads; all operations on it are pure.
#[derive(Debug, Clone)]
pub struct ModuliSet {
    id: u64,
    moduli: Vec<u64>,
    product: BigUint,
    partials: Vec<BigUint>,
    inverses: Vec<u64>,
    psi: BigUint,
}

/// The residues of one integer, tied to the `ModuliSet` that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueVector {
    residues: Vec<u64>,
    set_id: u64,
}

impl ResidueVector {
    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }
}

impl ModuliSet {
    /// Validates the moduli and precomputes `M`, `M_i`, `T_i` and `psi`.
    pub fn new(moduli: &[u64]) -> Result<Self, RnsError> {
        assert!(!moduli.is_empty(), "moduli list must be non-empty");
        for &m in moduli {
            if m < 2 {
                return Err(RnsError::InvalidModulus(m));
            }
        }
        for i in 0..moduli.len() {
            for j in (i + 1)..moduli.len() {
                if moduli[i].gcd(&moduli[j]) != 1 {
                    return Err(RnsError::NotCoprime(moduli[i], moduli[j]));
                }
            }
        }
        let product: BigUint = moduli.iter().map(|&m| BigUint::from(m)).product();
        let mut partials = Vec::with_capacity(moduli.len());
        let mut inverses = Vec::with_capacity(moduli.len());
        for &m in moduli {
            let mi = &product / m;
            let mi_mod = (&mi % m).to_u64().expect("residue fits u64");
            let ti = mod_inverse(mi_mod, m).expect("M_i is co-prime to m_i");
            partials.push(mi);
            inverses.push(ti);
        }
        let psi = (&product - 1u8) >> 1;
        Ok(Self {
            id: NEXT_SET_ID.fetch_add(1, Ordering::Relaxed),
            moduli: moduli.to_vec(),
            product,
            partials,
            inverses,
            psi,
        })
    }

    /// Builds one of the preset moduli sets.
    pub fn from_preset(preset: Preset) -> Self {
        Self::new(preset.moduli()).expect("preset moduli are valid")
    }

    pub fn len(&self) -> usize {
        self.moduli.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moduli.is_empty()
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    /// Range `M`, the product of the moduli.
    pub fn product(&self) -> &BigUint {
        &self.product
    }

    /// `M_i = M / m_i`.
    pub fn partial_products(&self) -> &[BigUint] {
        &self.partials
    }

    /// `T_i`, the multiplicative inverse of `M_i` modulo `m_i`.
    pub fn inverses(&self) -> &[u64] {
        &self.inverses
    }

    /// Half range `psi = floor((M-1)/2)`; signed values live in `[-psi, psi]`.
    pub fn psi(&self) -> &BigUint {
        &self.psi
    }

    /// Builds a residue vector from raw residues, checking lengths and ranges.
    pub fn vector_from_residues(&self, residues: Vec<u64>) -> Result<ResidueVector, RnsError> {
        if residues.len() != self.moduli.len() {
            return Err(RnsError::LengthMismatch(residues.len(), self.moduli.len()));
        }
        for (&r, &m) in residues.iter().zip(&self.moduli) {
            if r >= m {
                return Err(RnsError::ResidueRange { value: r, modulus: m });
            }
        }
        Ok(ResidueVector { residues, set_id: self.id })
    }

    /// Residues of a signed integer in `[-psi, psi]`. Negative values map
    /// through `A -> A + M` before per-modulus reduction.
    pub fn forward_convert(&self, value: &BigInt) -> Result<ResidueVector, RnsError> {
        if value.magnitude() > &self.psi {
            return Err(RnsError::OutOfRange { psi: self.psi.clone() });
        }
        let m_signed = BigInt::from(self.product.clone());
        let rep = value.mod_floor(&m_signed).to_biguint().expect("mod_floor is non-negative");
        Ok(self.residues_unsigned(&rep))
    }

    /// Convenience wrapper over [`forward_convert`](Self::forward_convert).
    pub fn forward_convert_i64(&self, value: i64) -> Result<ResidueVector, RnsError> {
        self.forward_convert(&BigInt::from(value))
    }

    /// Residues of an unsigned value (reduced modulo `M` implicitly).
    pub fn residues_unsigned(&self, value: &BigUint) -> ResidueVector {
        let residues = self
            .moduli
            .iter()
            .map(|&m| (value % m).to_u64().expect("residue fits u64"))
            .collect();
        ResidueVector { residues, set_id: self.id }
    }

    fn check_owned(&self, rv: &ResidueVector) -> Result<(), RnsError> {
        if rv.set_id != self.id {
            return Err(RnsError::ModuliMismatch);
        }
        Ok(())
    }

    /// CRT reconstruction into `[0, M)`.
    pub fn crt_reconstruct_unsigned(&self, rv: &ResidueVector) -> Result<BigUint, RnsError> {
        self.check_owned(rv)?;
        let mut acc = BigUint::zero();
        for ((&a, mi), &ti) in rv.residues.iter().zip(&self.partials).zip(&self.inverses) {
            acc += mi * (a as u128 * ti as u128);
        }
        Ok(acc % &self.product)
    }

    /// Signed CRT reconstruction: raw values above `psi` map to `raw - M`.
    ///
    /// For even `M` the residue class `psi + 1` has no counterpart inside
    /// `[-psi, psi]` and reconstructs to `-(psi + 1)`.
    pub fn crt_reconstruct(&self, rv: &ResidueVector) -> Result<BigInt, RnsError> {
        let raw = self.crt_reconstruct_unsigned(rv)?;
        if raw <= self.psi {
            Ok(BigInt::from(raw))
        } else {
            Ok(BigInt::from(raw) - BigInt::from(self.product.clone()))
        }
    }

    /// Signed CRT reconstruction narrowed to `i64`.
    pub fn crt_reconstruct_i64(&self, rv: &ResidueVector) -> Result<i64, RnsError> {
        let v = self.crt_reconstruct(rv)?;
        v.to_i64().ok_or(RnsError::OutOfRange { psi: self.psi.clone() })
    }

    /// Element-wise `(a_i + b_i) mod m_i`.
    pub fn residue_add(&self, a: &ResidueVector, b: &ResidueVector) -> Result<ResidueVector, RnsError> {
        self.check_owned(a)?;
        self.check_owned(b)?;
        let residues = a
            .residues
            .iter()
            .zip(&b.residues)
            .zip(&self.moduli)
            .map(|((&x, &y), &m)| ((x as u128 + y as u128) % m as u128) as u64)
            .collect();
        Ok(ResidueVector { residues, set_id: self.id })
    }

    /// Element-wise `(a_i * b_i) mod m_i`.
    pub fn residue_mul(&self, a: &ResidueVector, b: &ResidueVector) -> Result<ResidueVector, RnsError> {
        self.check_owned(a)?;
        self.check_owned(b)?;
        let residues = a
            .residues
            .iter()
            .zip(&b.residues)
            .zip(&self.moduli)
            .map(|((&x, &y), &m)| ((x as u128 * y as u128) % m as u128) as u64)
            .collect();
        Ok(ResidueVector { residues, set_id: self.id })
    }
}

/// `|sum_i w_i * x_i|_m` for operands already reduced modulo `m`.
pub fn modular_dot(w: &[u64], x: &[u64], m: u64) -> Result<u64, RnsError> {
    if w.len() != x.len() {
        return Err(RnsError::LengthMismatch(w.len(), x.len()));
    }
    debug_assert!(m >= 2);
    let m128 = m as u128;
    let mut acc: u128 = 0;
    for (&wi, &xi) in w.iter().zip(x) {
        debug_assert!(wi < m && xi < m, "operands must be reduced modulo m");
        acc = (acc + wi as u128 * xi as u128) % m128;
    }
    Ok(acc as u64)
}

/// Result of the output-range constraint check `log2(M) >= b_out`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RangeCheck {
    pub ok: bool,
    pub b_out: u32,
}

/// Full dot-product output width `b_out = b_in + b_w + ceil(log2 h) - 1`
/// and whether the moduli set range covers it. Non-power-of-two `h` uses
/// the conservative `ceil(log2 h)`.
pub fn check_range_constraint(b_in: u32, b_w: u32, h: u64, ms: &ModuliSet) -> RangeCheck {
    let b_out = b_in + b_w + ceil_log2(h) - 1;
    let ok = *ms.product() >= (BigUint::one() << b_out);
    RangeCheck { ok, b_out }
}

/// Named preset moduli sets. `RnsN` keeps every modulus below `2^N`, so
/// `N`-bit data converters cover the residues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Rns4,
    Rns5,
    Rns6,
    Rns7,
    Rns8,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::Rns4,
        Preset::Rns5,
        Preset::Rns6,
        Preset::Rns7,
        Preset::Rns8,
    ];

    pub fn moduli(self) -> &'static [u64] {
        match self {
            Preset::Rns4 => &[15, 14, 13, 11],
            Preset::Rns5 => &[31, 29, 28, 27],
            Preset::Rns6 => &[63, 62, 61, 59],
            Preset::Rns7 => &[127, 126, 125],
            Preset::Rns8 => &[255, 254, 253],
        }
    }

    /// Residue bit width `b = max_i ceil(log2 m_i)`.
    pub fn data_bits(self) -> u32 {
        match self {
            Preset::Rns4 => 4,
            Preset::Rns5 => 5,
            Preset::Rns6 => 6,
            Preset::Rns7 => 7,
            Preset::Rns8 => 8,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Rns4 => "rns4",
            Preset::Rns5 => "rns5",
            Preset::Rns6 => "rns6",
            Preset::Rns7 => "rns7",
            Preset::Rns8 => "rns8",
        }
    }

    pub fn from_name(name: &str) -> Option<Preset> {
        Preset::ALL.iter().copied().find(|p| p.name() == name)
    }

    pub fn from_data_bits(bits: u32) -> Option<Preset> {
        Preset::ALL.iter().copied().find(|p| p.data_bits() == bits)
    }
}
