//! Bit-accurate models of analog GEMM tile cores.
//!
//! Three core kinds share one dataflow (scale, quantize, integer MVM,
//! capture, rescale) and differ only in the capture stage:
//!
//! - `Lp`: the ADC keeps the `b_adc` most significant bits of the
//!   `b_out`-bit dot product, so low-order information is lost.
//! - `Hp`: the ADC is wide enough (`b_adc = b_out`) to capture the dot
//!   product losslessly.
//! - `Rns`: one modular MVM per modulus; a per-output analog modulo keeps
//!   every residue inside `[0, m_i)`, and the CRT rebuilds the exact
//!   signed dot product.
//!
//! Ring-oscillator and phase-shifter models of the analog modulo live here
//! as behavioral reference implementations.

use rand::Rng;
use thiserror::Error;

use crate::rns::{ceil_log2, check_range_constraint, modular_dot, ModuliSet, RnsError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalogError {
    #[error("input contains a non-finite value")]
    NonFiniteInput,
    #[error("operand shapes do not agree: {0}")]
    ShapeMismatch(String),
    #[error("moduli range 2^{log2_m:.2} cannot hold {b_out}-bit outputs")]
    RangeViolation { log2_m: f64, b_out: u32 },
    #[error("ring oscillator needs an odd inverter count >= 3, got {0}")]
    InvalidInverterCount(u64),
    #[error("weight digit {value} does not fit in {digits} digits")]
    DigitOverflow { value: u64, digits: u32 },
    #[error("accumulated phase drifted {drift:e} from an integer residue")]
    PhaseDrift { drift: f64 },
    #[error("core configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Rns(#[from] RnsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoreKind {
    Lp,
    Hp,
    Rns,
}

impl CoreKind {
    pub fn name(self) -> &'static str {
        match self {
            CoreKind::Lp => "lp",
            CoreKind::Hp => "hp",
            CoreKind::Rns => "rns",
        }
    }
}

/// A simulated h-by-h analog tile core.
#[derive(Debug, Clone)]
pub struct CoreConfig {
    kind: CoreKind,
    b_dac: u32,
    b_adc: u32,
    b_out: u32,
    h: u64,
    moduli: Option<ModuliSet>,
}

impl CoreConfig {
    /// Low-precision fixed point: `b_adc = b_dac < b_out`.
    pub fn lp(bits: u32, h: u64) -> Result<Self, AnalogError> {
        Self::fixed_point(CoreKind::Lp, bits, h)
    }

    /// High-precision fixed point: `b_adc = b_out`.
    pub fn hp(bits: u32, h: u64) -> Result<Self, AnalogError> {
        Self::fixed_point(CoreKind::Hp, bits, h)
    }

    fn fixed_point(kind: CoreKind, bits: u32, h: u64) -> Result<Self, AnalogError> {
        if bits < 2 {
            return Err(AnalogError::InvalidConfig(format!("need >= 2 data bits, got {bits}")));
        }
        if h < 1 {
            return Err(AnalogError::InvalidConfig("tile size must be >= 1".into()));
        }
        let b_out = 2 * bits + ceil_log2(h) - 1;
        if b_out > 62 {
            return Err(AnalogError::InvalidConfig(format!("output width {b_out} exceeds 62 bits")));
        }
        let b_adc = match kind {
            CoreKind::Lp => bits,
            CoreKind::Hp => b_out,
            CoreKind::Rns => unreachable!(),
        };
        Ok(Self { kind, b_dac: bits, b_adc, b_out, h, moduli: None })
    }

    /// RNS core over a moduli set. Converter width is
    /// `max_i ceil(log2 m_i)` and the set must satisfy the range
    /// constraint for `h`-element dot products.
    pub fn rns(moduli: ModuliSet, h: u64) -> Result<Self, AnalogError> {
        if h < 1 {
            return Err(AnalogError::InvalidConfig("tile size must be >= 1".into()));
        }
        let bits = moduli
            .moduli()
            .iter()
            .map(|&m| 64 - (m - 1).leading_zeros())
            .max()
            .expect("non-empty moduli");
        if bits < 2 {
            return Err(AnalogError::InvalidConfig(
                "largest modulus must need at least 2 bits".into(),
            ));
        }
        let check = check_range_constraint(bits, bits, h, &moduli);
        if !check.ok {
            let log2_m = biguint_log2(moduli.product());
            return Err(AnalogError::RangeViolation { log2_m, b_out: check.b_out });
        }
        if check.b_out > 62 {
            return Err(AnalogError::InvalidConfig(format!(
                "output width {} exceeds 62 bits",
                check.b_out
            )));
        }
        Ok(Self {
            kind: CoreKind::Rns,
            b_dac: bits,
            b_adc: bits,
            b_out: check.b_out,
            h,
            moduli: Some(moduli),
        })
    }

    pub fn rns_preset(preset: crate::rns::Preset, h: u64) -> Result<Self, AnalogError> {
        Self::rns(ModuliSet::from_preset(preset), h)
    }

    pub fn kind(&self) -> CoreKind {
        self.kind
    }

    pub fn b_dac(&self) -> u32 {
        self.b_dac
    }

    pub fn b_adc(&self) -> u32 {
        self.b_adc
    }

    /// Full dot-product width `b_in + b_w + ceil(log2 h) - 1`.
    pub fn b_out(&self) -> u32 {
        self.b_out
    }

    pub fn h(&self) -> u64 {
        self.h
    }

    pub fn moduli(&self) -> Option<&ModuliSet> {
        self.moduli.as_ref()
    }

    /// Largest quantized magnitude, `2^(b_dac - 1) - 1`.
    pub fn q_max(&self) -> i64 {
        (1i64 << (self.b_dac - 1)) - 1
    }

    /// Bits dropped by the LP capture stage.
    pub fn lost_bits(&self) -> u32 {
        self.b_out - self.b_adc
    }
}

fn biguint_log2(v: &num_bigint::BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 53 {
        use num_traits::ToPrimitive;
        v.to_f64().unwrap_or(0.0).log2()
    } else {
        let top = (v >> (bits - 53)).to_u64_digits()[0] as f64;
        top.log2() + (bits - 53) as f64
    }
}

/// Signed integer codes plus the dynamic scale they were quantized with.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedVector {
    pub values: Vec<i64>,
    pub scale: f32,
    pub bits: u32,
}

impl QuantizedVector {
    pub fn q_max(&self) -> i64 {
        (1i64 << (self.bits - 1)) - 1
    }

    pub fn dequantize(&self) -> Vec<f32> {
        let q_max = self.q_max() as f64;
        self.values
            .iter()
            .map(|&q| (q as f64 * self.scale as f64 / q_max) as f32)
            .collect()
    }
}

/// Symmetric round-to-nearest quantization with a single dynamic scale
/// `max |v|` (1 for an all-zero vector). Codes span
/// `[-(2^(b-1) - 1), 2^(b-1) - 1]`; ties round away from zero.
pub fn quantize_symmetric(values: &[f32], bits: u32) -> Result<QuantizedVector, AnalogError> {
    assert!(bits >= 2, "need at least 2 bits for a signed code");
    if values.iter().any(|v| !v.is_finite()) {
        return Err(AnalogError::NonFiniteInput);
    }
    let max_abs = values.iter().fold(0f32, |acc, &v| acc.max(v.abs()));
    let scale = if max_abs == 0.0 { 1.0 } else { max_abs };
    let q_max = ((1i64 << (bits - 1)) - 1) as f64;
    let quantized = values
        .iter()
        .map(|&v| (v as f64 / scale as f64 * q_max).round() as i64)
        .collect();
    Ok(QuantizedVector { values: quantized, scale, bits })
}

/// Captured tile outputs: post-ADC integer codes, per-row rescale factors,
/// and the rescaled floats `as_float[i] = raw[i] * scales[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TileOutput {
    pub raw: Vec<i64>,
    pub scales: Vec<f32>,
    pub as_float: Vec<f32>,
}

fn exact_row_dots(rows: &[QuantizedVector], x: &QuantizedVector, cfg: &CoreConfig) -> Result<Vec<i64>, AnalogError> {
    if rows.is_empty() {
        return Err(AnalogError::ShapeMismatch("tile has no rows".into()));
    }
    if rows.len() as u64 > cfg.h() {
        return Err(AnalogError::ShapeMismatch(format!(
            "{} rows exceed tile size {}",
            rows.len(),
            cfg.h()
        )));
    }
    if x.values.len() as u64 > cfg.h() {
        return Err(AnalogError::ShapeMismatch(format!(
            "input length {} exceeds tile size {}",
            x.values.len(),
            cfg.h()
        )));
    }
    let q_max = cfg.q_max();
    debug_assert!(x.values.iter().all(|&v| v.abs() <= q_max));
    let mut raw = Vec::with_capacity(rows.len());
    for row in rows {
        if row.values.len() != x.values.len() {
            return Err(AnalogError::ShapeMismatch(format!(
                "row length {} vs input length {}",
                row.values.len(),
                x.values.len()
            )));
        }
        debug_assert!(row.values.iter().all(|&v| v.abs() <= q_max));
        let acc: i128 = row
            .values
            .iter()
            .zip(&x.values)
            .map(|(&w, &v)| w as i128 * v as i128)
            .sum();
        raw.push(acc as i64);
    }
    Ok(raw)
}

fn finish_tile(raw: Vec<i64>, rows: &[QuantizedVector], x: &QuantizedVector, cfg: &CoreConfig) -> TileOutput {
    let q_max = cfg.q_max() as f64;
    let scales: Vec<f32> = rows
        .iter()
        .map(|row| (row.scale as f64 * x.scale as f64 / (q_max * q_max)) as f32)
        .collect();
    let as_float = raw
        .iter()
        .zip(&scales)
        .map(|(&r, &s)| (r as f64 * s as f64) as f32)
        .collect();
    TileOutput { raw, scales, as_float }
}

/// High-precision MVM: exact integer dot products, captured losslessly.
pub fn mvm_hp(rows: &[QuantizedVector], x: &QuantizedVector, cfg: &CoreConfig) -> Result<TileOutput, AnalogError> {
    debug_assert_eq!(cfg.kind(), CoreKind::Hp);
    let raw = exact_row_dots(rows, x, cfg)?;
    Ok(finish_tile(raw, rows, x, cfg))
}

/// Rounds `o / 2^shift` half away from zero, clamps to the signed
/// `b_adc` code range, and re-expands to output scale.
pub(crate) fn adc_capture(o: i64, shift: u32, b_adc: u32) -> i64 {
    let step = 1i64 << shift;
    let half = step >> 1;
    let captured = if o >= 0 { (o + half) >> shift } else { -((-o + half) >> shift) };
    let limit = (1i64 << (b_adc - 1)) - 1;
    captured.clamp(-limit, limit) << shift
}

/// Low-precision MVM: the ADC keeps only the top `b_adc` of `b_out` bits.
pub fn mvm_lp(rows: &[QuantizedVector], x: &QuantizedVector, cfg: &CoreConfig) -> Result<TileOutput, AnalogError> {
    debug_assert_eq!(cfg.kind(), CoreKind::Lp);
    let shift = cfg.lost_bits();
    let raw = exact_row_dots(rows, x, cfg)?
        .into_iter()
        .map(|o| adc_capture(o, shift, cfg.b_adc()))
        .collect();
    Ok(finish_tile(raw, rows, x, cfg))
}

/// RNS MVM: forward-convert the integer operands, run one modular dot
/// product per modulus and output row, then CRT-reconstruct the signed
/// result. Bit-exact with [`mvm_hp`] whenever the range constraint holds.
pub fn mvm_rns(rows: &[QuantizedVector], x: &QuantizedVector, cfg: &CoreConfig) -> Result<TileOutput, AnalogError> {
    debug_assert_eq!(cfg.kind(), CoreKind::Rns);
    let ms = cfg.moduli().expect("RNS core carries its moduli");
    // Shape validation shared with the other cores.
    if rows.is_empty() {
        return Err(AnalogError::ShapeMismatch("tile has no rows".into()));
    }
    for row in rows {
        if row.values.len() != x.values.len() {
            return Err(AnalogError::ShapeMismatch(format!(
                "row length {} vs input length {}",
                row.values.len(),
                x.values.len()
            )));
        }
    }
    if rows.len() as u64 > cfg.h() || x.values.len() as u64 > cfg.h() {
        return Err(AnalogError::ShapeMismatch("operands exceed tile size".into()));
    }

    let moduli = ms.moduli();
    let to_residues = |values: &[i64], m: u64| -> Vec<u64> {
        values.iter().map(|&v| v.rem_euclid(m as i64) as u64).collect()
    };
    // residue_dots[row][modulus index]
    let mut residue_dots = vec![Vec::with_capacity(moduli.len()); rows.len()];
    for &m in moduli {
        let xr = to_residues(&x.values, m);
        for (row, dots) in rows.iter().zip(&mut residue_dots) {
            let wr = to_residues(&row.values, m);
            dots.push(modular_dot(&wr, &xr, m)?);
        }
    }
    let raw = residue_dots
        .into_iter()
        .map(|dots| {
            let rv = ms.vector_from_residues(dots).expect("residues are reduced");
            ms.crt_reconstruct_i64(&rv)
                .expect("dot product fits the signed RNS range by the range constraint")
        })
        .collect();
    Ok(finish_tile(raw, rows, x, cfg))
}

/// Replaces each output element independently with probability `p_err` by a
/// uniform value over the representable signed output range. Returns the
/// perturbed outputs and the corruption mask.
pub fn corrupt_outputs(
    tile: &TileOutput,
    cfg: &CoreConfig,
    p_err: f64,
    rng: &mut impl Rng,
) -> (TileOutput, Vec<bool>) {
    assert!((0.0..=1.0).contains(&p_err), "p_err must be a probability");
    let limit = (1i64 << (cfg.b_out() - 1)) - 1;
    let mut out = tile.clone();
    let mut mask = vec![false; tile.raw.len()];
    for (((raw, value), scale), flagged) in out
        .raw
        .iter_mut()
        .zip(&mut out.as_float)
        .zip(&out.scales)
        .zip(&mut mask)
    {
        if rng.gen_bool(p_err) {
            *raw = rng.gen_range(-limit..=limit);
            *value = (*raw as f64 * *scale as f64) as f32;
            *flagged = true;
        }
    }
    (out, mask)
}

/// Behavioral ring-oscillator modulo. The oscillator state advances one
/// inverter per propagation delay; sampling after `a` delays reads off
/// `a mod n`. Runs in `O(a)` by construction.
pub fn ring_oscillator_modulo(a: u64, inverters: u64) -> Result<u64, AnalogError> {
    if inverters < 3 || inverters.is_multiple_of(2) {
        return Err(AnalogError::InvalidInverterCount(inverters));
    }
    let start = 0u64;
    let mut state = start;
    for _ in 0..a {
        state += 1;
        if state == inverters {
            state = 0;
        }
    }
    Ok((state + inverters - start) % inverters)
}

/// Behavioral phase-shifter modular dot product. Each set bit `j` of
/// weight digit `w_i` contributes phase `x_i * 2^j * (2 pi / m)`; phases
/// wrap at `2 pi` and the final phase is read back as a residue.
pub fn phase_shifter_modular_dot(
    w: &[u64],
    x: &[u64],
    m: u64,
    digit_count: u32,
) -> Result<u64, AnalogError> {
    if w.len() != x.len() {
        return Err(AnalogError::ShapeMismatch(format!("{} vs {}", w.len(), x.len())));
    }
    assert!(m >= 2);
    assert!((1..64).contains(&digit_count));
    let tau = std::f64::consts::TAU;
    let unit = tau / m as f64;
    let mut phase = 0f64;
    for (&wi, &xi) in w.iter().zip(x) {
        if wi >= 1u64 << digit_count {
            return Err(AnalogError::DigitOverflow { value: wi, digits: digit_count });
        }
        for j in 0..digit_count {
            if wi >> j & 1 == 1 {
                phase = (phase + xi as f64 * (1u64 << j) as f64 * unit) % tau;
            }
        }
    }
    let scaled = phase / tau * m as f64;
    let candidate = scaled.round();
    let drift = (scaled - candidate).abs();
    if drift > 1e-6 {
        return Err(AnalogError::PhaseDrift { drift });
    }
    Ok(candidate as u64 % m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rns::Preset;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn quantize_examples() {
        let q = quantize_symmetric(&[0.5, -1.0, 0.25], 4).unwrap();
        assert_eq!(q.values, vec![4, -7, 2]);
        assert_eq!(q.scale, 1.0);

        let q = quantize_symmetric(&[0.0, 0.0], 6).unwrap();
        assert_eq!(q.values, vec![0, 0]);
        assert_eq!(q.scale, 1.0);

        for bits in [2u32, 5, 8] {
            let q = quantize_symmetric(&[1.0], bits).unwrap();
            assert_eq!(q.values, vec![(1i64 << (bits - 1)) - 1]);
            assert_eq!(q.dequantize(), vec![1.0]);
        }

        assert_eq!(
            quantize_symmetric(&[f32::NAN], 4).unwrap_err(),
            AnalogError::NonFiniteInput
        );
    }

    #[test]
    fn quantize_error_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for bits in [3u32, 6, 8] {
            let v: Vec<f32> = (0..64).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let q = quantize_symmetric(&v, bits).unwrap();
            let back = q.dequantize();
            let tol = q.scale as f64 / ((1i64 << (bits - 1)) - 1) as f64 / 2.0 + 1e-6;
            for (a, b) in v.iter().zip(&back) {
                assert!(((a - b).abs() as f64) <= tol);
            }
        }
    }

    fn prequantized(values: Vec<i64>, bits: u32) -> QuantizedVector {
        QuantizedVector { values, scale: 1.0, bits }
    }

    #[test]
    fn hp_small_integer_example() {
        let cfg = CoreConfig::hp(6, 2).unwrap();
        let rows = vec![prequantized(vec![1, 2], 6), prequantized(vec![3, 4], 6)];
        let x = prequantized(vec![5, 6], 6);
        let out = mvm_hp(&rows, &x, &cfg).unwrap();
        assert_eq!(out.raw, vec![17, 39]);

        let zero = prequantized(vec![0, 0], 6);
        assert_eq!(mvm_hp(&rows, &zero, &cfg).unwrap().raw, vec![0, 0]);
    }

    #[test]
    fn hp_identity_reproduces_input() {
        let cfg = CoreConfig::hp(8, 4).unwrap();
        let q_max = cfg.q_max();
        let rows: Vec<QuantizedVector> = (0..4)
            .map(|r| {
                let mut v = vec![0i64; 4];
                v[r] = q_max;
                QuantizedVector { values: v, scale: 1.0, bits: 8 }
            })
            .collect();
        let x = quantize_symmetric(&[0.25, -0.75, 0.5, 1.0], 8).unwrap();
        let out = mvm_hp(&rows, &x, &cfg).unwrap();
        let expect = x.dequantize();
        for (got, want) in out.as_float.iter().zip(&expect) {
            assert!((got - want).abs() < 1e-5, "{got} vs {want}");
        }
    }

    #[test]
    fn lp_capture_examples() {
        let cfg = CoreConfig::lp(4, 128).unwrap();
        assert_eq!(cfg.lost_bits(), 10);
        assert_eq!(adc_capture(511, 10, 4), 0);
        assert_eq!(adc_capture(5120, 10, 4), 5120);
        assert_eq!(adc_capture(-511, 10, 4), 0);
        assert_eq!(adc_capture(512, 10, 4), 1024);
        assert_eq!(adc_capture(-512, 10, 4), -1024);
        // Clamp at the signed ADC limit.
        assert_eq!(adc_capture(6272, 10, 4), 6 << 10);
        assert_eq!(adc_capture(1 << 13, 4, 4), 7 << 4);
    }

    #[test]
    fn per_modulus_dots_then_crt_match_hand_computation() {
        // w = (1, 2), x = (2, 1) over {3, 5}: per-modulus dots (1, 4),
        // CRT gives 4 = the plain dot product.
        let ms = ModuliSet::new(&[3, 5]).unwrap();
        let dots: Vec<u64> = ms
            .moduli()
            .iter()
            .map(|&m| modular_dot(&[1 % m, 2 % m], &[2 % m, 1 % m], m).unwrap())
            .collect();
        assert_eq!(dots, vec![1, 4]);
        let rv = ms.vector_from_residues(dots).unwrap();
        assert_eq!(ms.crt_reconstruct_i64(&rv).unwrap(), 4);
    }

    #[test]
    fn rns_core_on_tiny_valid_config() {
        // Smallest shapes that satisfy the range constraint at h = 2.
        let ms = ModuliSet::new(&[7, 9, 11, 13]).unwrap();
        let cfg = CoreConfig::rns(ms, 2).unwrap();
        assert_eq!(cfg.b_dac(), 4);
        let rows = vec![prequantized(vec![1, 2], cfg.b_dac())];
        let x = prequantized(vec![2, 1], cfg.b_dac());
        let out = mvm_rns(&rows, &x, &cfg).unwrap();
        assert_eq!(out.raw, vec![4]);

        let zero = prequantized(vec![0, 0], cfg.b_dac());
        assert_eq!(mvm_rns(&rows, &zero, &cfg).unwrap().raw, vec![0]);
    }

    #[test]
    fn rns_equals_hp_on_random_tiles() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for preset in [Preset::Rns4, Preset::Rns8] {
            let bits = preset.data_bits();
            let rns_cfg = CoreConfig::rns_preset(preset, 16).unwrap();
            let hp_cfg = CoreConfig::hp(bits, 16).unwrap();
            for _ in 0..25 {
                let rows: Vec<QuantizedVector> = (0..16)
                    .map(|_| {
                        let v: Vec<f32> = (0..16).map(|_| rng.gen_range(-1.0..1.0)).collect();
                        quantize_symmetric(&v, bits).unwrap()
                    })
                    .collect();
                let xv: Vec<f32> = (0..16).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let x = quantize_symmetric(&xv, bits).unwrap();
                let rns = mvm_rns(&rows, &x, &rns_cfg).unwrap();
                let hp = mvm_hp(&rows, &x, &hp_cfg).unwrap();
                assert_eq!(rns.raw, hp.raw);
            }
        }
    }

    #[test]
    fn rns_config_rejects_insufficient_range() {
        let ms = ModuliSet::new(&[3, 5]).unwrap();
        assert!(matches!(
            CoreConfig::rns(ms, 128),
            Err(AnalogError::RangeViolation { .. })
        ));
        let rns4 = ModuliSet::from_preset(Preset::Rns4);
        assert!(CoreConfig::rns(rns4, 128).is_ok());
    }

    #[test]
    fn corruption_edges_and_determinism() {
        let cfg = CoreConfig::hp(6, 4).unwrap();
        let rows = vec![prequantized(vec![1, 2, 3, 4], 6)];
        let x = prequantized(vec![1, 1, 1, 1], 6);
        let out = mvm_hp(&rows, &x, &cfg).unwrap();

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (same, mask) = corrupt_outputs(&out, &cfg, 0.0, &mut rng);
        assert_eq!(same, out);
        assert!(mask.iter().all(|&b| !b));

        let (_, mask) = corrupt_outputs(&out, &cfg, 1.0, &mut rng);
        assert!(mask.iter().all(|&b| b));

        let mut r1 = ChaCha8Rng::seed_from_u64(7);
        let mut r2 = ChaCha8Rng::seed_from_u64(7);
        assert_eq!(
            corrupt_outputs(&out, &cfg, 0.5, &mut r1),
            corrupt_outputs(&out, &cfg, 0.5, &mut r2)
        );
    }

    #[test]
    fn ring_oscillator_examples() {
        assert_eq!(ring_oscillator_modulo(7, 3).unwrap(), 1);
        assert_eq!(ring_oscillator_modulo(0, 5).unwrap(), 0);
        assert_eq!(ring_oscillator_modulo(5, 5).unwrap(), 0);
        assert!(matches!(
            ring_oscillator_modulo(1, 4),
            Err(AnalogError::InvalidInverterCount(4))
        ));
        assert!(matches!(
            ring_oscillator_modulo(1, 1),
            Err(AnalogError::InvalidInverterCount(1))
        ));
        for a in [1u64, 29, 530, 9999] {
            assert_eq!(ring_oscillator_modulo(a, 7).unwrap(), a % 7);
        }
    }

    #[test]
    fn phase_shifter_examples() {
        assert_eq!(phase_shifter_modular_dot(&[5], &[2], 7, 3).unwrap(), 3);
        assert_eq!(phase_shifter_modular_dot(&[5, 3], &[0, 0], 7, 3).unwrap(), 0);
        assert!(matches!(
            phase_shifter_modular_dot(&[8], &[1], 7, 3),
            Err(AnalogError::DigitOverflow { .. })
        ));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let m = rng.gen_range(3u64..64);
            let w: Vec<u64> = (0..8).map(|_| rng.gen_range(0..8)).collect();
            let x: Vec<u64> = (0..8).map(|_| rng.gen_range(0..m)).collect();
            let expect = modular_dot(
                &w.iter().map(|&v| v % m).collect::<Vec<_>>(),
                &x,
                m,
            )
            .unwrap();
            assert_eq!(phase_shifter_modular_dot(&w, &x, m, 3).unwrap(), expect);
        }
    }
}
