//! Converter-energy comparison of the three core kinds across the preset
//! data widths.

use crate::config::EnergyCfg;
use crate::output::{fmt_f64, write_atomic, Csv};
use crate::{experiment_error, CliError, RunContext};
use rnsim_core::analog::CoreConfig;
use rnsim_core::energy::{dot_energy_report, ConverterParams, EnergyRow};
use rnsim_core::rns::Preset;

pub fn energy_rows(
    h: u64,
    weight_stationary: bool,
    params: &ConverterParams,
) -> Result<Vec<EnergyRow>, CliError> {
    let mut rows = Vec::new();
    for preset in Preset::ALL {
        let bits = preset.data_bits();
        for cfg in [
            CoreConfig::lp(bits, h).map_err(experiment_error)?,
            CoreConfig::hp(bits, h).map_err(experiment_error)?,
            CoreConfig::rns_preset(preset, h).map_err(experiment_error)?,
        ] {
            rows.push(dot_energy_report(&cfg, params, weight_stationary));
        }
    }
    Ok(rows)
}

pub fn run_energy(cfg: &EnergyCfg, ctx: &RunContext) -> Result<(), CliError> {
    let rows = energy_rows(cfg.h, cfg.weight_stationary, &cfg.params()?)?;
    let mut csv = Csv::new(&[
        "kind",
        "b_dac",
        "b_adc",
        "nModuli",
        "dacEnergyJ",
        "adcEnergyJ",
        "totalJ",
    ]);
    for row in &rows {
        csv.row(&[
            row.kind.name().into(),
            row.b_dac.to_string(),
            row.b_adc.to_string(),
            row.converter_sets.to_string(),
            fmt_f64(row.dac_energy_j),
            fmt_f64(row.adc_energy_j),
            fmt_f64(row.total_j),
        ]);
    }
    let path = ctx.out_dir.join("energy.csv");
    write_atomic(&path, &csv.into_bytes())?;

    println!(
        "energy per dot product, h = {}, weights {}",
        cfg.h,
        if cfg.weight_stationary { "stationary" } else { "streamed" }
    );
    println!("  {:<5} {:>5} {:>5} {:>4} {:>12} {:>12} {:>12}", "core", "b_dac", "b_adc", "sets", "dac [J]", "adc [J]", "total [J]");
    for row in &rows {
        println!(
            "  {:<5} {:>5} {:>5} {:>4} {:>12.4e} {:>12.4e} {:>12.4e}",
            row.kind.name(),
            row.b_dac,
            row.b_adc,
            row.converter_sets,
            row.dac_energy_j,
            row.adc_energy_j,
            row.total_j
        );
    }
    println!("  wrote {}", path.display());
    Ok(())
}
