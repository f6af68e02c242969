//! Data-converter energy accounting per dot product.

use thiserror::Error;

use crate::analog::{CoreConfig, CoreKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnergyError {
    #[error("converter parameter {0} must be strictly positive")]
    InvalidParam(&'static str),
}

/// Converter constants. Defaults: `Cu = 0.5 fF`, `Vdd = 1 V`,
/// `k1 = 100 fJ`, `k2 = 1 aJ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConverterParams {
    pub cu_farads: f64,
    pub vdd_volts: f64,
    pub k1_joules: f64,
    pub k2_joules: f64,
}

impl Default for ConverterParams {
    fn default() -> Self {
        Self {
            cu_farads: 0.5e-15,
            vdd_volts: 1.0,
            k1_joules: 100e-15,
            k2_joules: 1e-18,
        }
    }
}

impl ConverterParams {
    pub fn validate(&self) -> Result<(), EnergyError> {
        if self.cu_farads <= 0.0 {
            return Err(EnergyError::InvalidParam("cu_farads"));
        }
        if self.vdd_volts <= 0.0 {
            return Err(EnergyError::InvalidParam("vdd_volts"));
        }
        if self.k1_joules <= 0.0 {
            return Err(EnergyError::InvalidParam("k1_joules"));
        }
        if self.k2_joules <= 0.0 {
            return Err(EnergyError::InvalidParam("k2_joules"));
        }
        Ok(())
    }
}

/// DAC energy per conversion: `ENOB^2 * Cu * Vdd^2`.
pub fn dac_energy(enob: u32, params: &ConverterParams) -> f64 {
    assert!(enob >= 1);
    let e = enob as f64;
    e * e * params.cu_farads * params.vdd_volts * params.vdd_volts
}

/// ADC energy per conversion: `k1 * ENOB + k2 * 4^ENOB`. The exponential
/// term dominates at large ENOB.
pub fn adc_energy(enob: u32, params: &ConverterParams) -> f64 {
    assert!(enob >= 1);
    params.k1_joules * enob as f64 + params.k2_joules * 4f64.powi(enob as i32)
}

/// Converter energy for one dot product of length `h` on one core.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyRow {
    pub kind: CoreKind,
    pub b_dac: u32,
    pub b_adc: u32,
    /// Parallel converter sets (the modulus count for an RNS core, 1 otherwise).
    pub converter_sets: u32,
    pub dac_conversions_per_set: u64,
    pub adc_conversions_per_set: u64,
    pub dac_energy_j: f64,
    pub adc_energy_j: f64,
    pub total_j: f64,
}

/// Counts conversions for one length-`h` dot product: `h` input DACs plus
/// `h` weight DACs (skipped when the weights stay programmed) and one ADC
/// per output. An RNS core runs one converter set per modulus.
pub fn dot_energy_report(
    cfg: &CoreConfig,
    params: &ConverterParams,
    weight_stationary: bool,
) -> EnergyRow {
    let sets = match cfg.kind() {
        CoreKind::Rns => cfg.moduli().expect("RNS core has moduli").len() as u32,
        _ => 1,
    };
    conversion_energy_row(
        cfg.kind(),
        cfg.b_dac(),
        cfg.b_adc(),
        sets,
        cfg.h(),
        params,
        weight_stationary,
    )
}

/// Core-agnostic conversion counting; `h = 0` degenerates to ADC-only cost.
pub fn conversion_energy_row(
    kind: CoreKind,
    b_dac: u32,
    b_adc: u32,
    converter_sets: u32,
    h: u64,
    params: &ConverterParams,
    weight_stationary: bool,
) -> EnergyRow {
    let dac_per_set = if weight_stationary { h } else { 2 * h };
    let adc_per_set = 1u64;
    let dac_e = converter_sets as f64 * (dac_per_set as f64 * dac_energy(b_dac, params));
    let adc_e = converter_sets as f64 * (adc_per_set as f64 * adc_energy(b_adc, params));
    EnergyRow {
        kind,
        b_dac,
        b_adc,
        converter_sets,
        dac_conversions_per_set: dac_per_set,
        adc_conversions_per_set: adc_per_set,
        dac_energy_j: dac_e,
        adc_energy_j: adc_e,
        total_j: dac_e + adc_e,
    }
}
