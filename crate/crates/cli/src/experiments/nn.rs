//! Desk-scale network experiments: training, inference, and accuracy
//! under injected output corruption.

use crate::config::{model_spec, InferCfg, NoiseSweepCfg, TrainCfg};
use crate::output::{fmt_f32, fmt_f64, write_atomic, Csv};
use crate::{experiment_error, CliError, RunContext};
use rnsim_core::nn::{evaluate, load_weights, save_weights, train, Corruption, TrainConfig};
use rnsim_core::seed;

pub fn run_train(cfg: &TrainCfg, ctx: &RunContext) -> Result<(), CliError> {
    let data = cfg.dataset.load()?;
    let spec = model_spec(&cfg.model)?;
    let core = cfg.core.build()?;
    let train_cfg = TrainConfig {
        steps: cfg.steps,
        learning_rate: cfg.learning_rate,
        momentum: cfg.momentum,
        seed: ctx.seed(cfg.seed),
        record_every: cfg.record_every.max(1),
        ..Default::default()
    };
    let result = train(&spec, &data, core.as_ref(), &train_cfg).map_err(experiment_error)?;

    let mut csv = Csv::new(&["step", "loss", "train_accuracy"]);
    for point in &result.history {
        csv.row(&[
            point.step.to_string(),
            fmt_f32(point.loss),
            fmt_f64(point.accuracy),
        ]);
    }
    let metrics_path = ctx.out_dir.join("train_metrics.csv");
    write_atomic(&metrics_path, &csv.into_bytes())?;
    let weights_path = ctx.out_dir.join("weights.rnst");
    std::fs::create_dir_all(&ctx.out_dir)
        .map_err(|e| CliError::ExperimentFailed(e.to_string()))?;
    save_weights(&result.state.model, &weights_path).map_err(experiment_error)?;

    println!(
        "train: core {} on {} samples, {} steps",
        cfg.core.label(),
        data.len(),
        cfg.steps
    );
    println!("  final train accuracy = {:.4}", result.final_accuracy);
    println!("  wrote {}", metrics_path.display());
    println!("  wrote {}", weights_path.display());
    Ok(())
}

pub fn run_infer(cfg: &InferCfg, ctx: &RunContext) -> Result<(), CliError> {
    let data = cfg.dataset.load()?;
    let spec = model_spec(&cfg.model)?;
    let core = cfg.core.build()?;
    let model = load_weights(&spec, &cfg.weights).map_err(experiment_error)?;
    let accuracy = evaluate(&model, &data, core.as_ref(), None).map_err(experiment_error)?;

    let summary = serde_json::json!({
        "core": cfg.core.label(),
        "samples": data.len(),
        "accuracy": accuracy,
    });
    let path = ctx.out_dir.join("infer_summary.json");
    write_atomic(&path, format!("{:#}\n", summary).as_bytes())?;
    println!("infer: core {} accuracy = {accuracy:.4} on {} samples", cfg.core.label(), data.len());
    println!("  wrote {}", path.display());
    Ok(())
}

pub fn run_noise_sweep(cfg: &NoiseSweepCfg, ctx: &RunContext) -> Result<(), CliError> {
    let data = cfg.dataset.load()?;
    let spec = model_spec(&cfg.model)?;
    let core = cfg.core.build()?;
    let master_seed = ctx.seed(cfg.seed);
    let train_cfg = TrainConfig {
        steps: cfg.steps,
        learning_rate: cfg.learning_rate,
        momentum: cfg.momentum,
        seed: master_seed,
        ..Default::default()
    };
    // Train once without corruption, then sweep inference-time noise.
    let result = train(&spec, &data, core.as_ref(), &train_cfg).map_err(experiment_error)?;

    let mut csv = Csv::new(&["p_err", "accuracy"]);
    println!(
        "noise-sweep: core {} trained to {:.4}; sweeping {} corruption levels",
        cfg.core.label(),
        result.final_accuracy,
        cfg.p_err_values.len()
    );
    for (i, &p_err) in cfg.p_err_values.iter().enumerate() {
        if !(0.0..=1.0).contains(&p_err) {
            return Err(CliError::ConfigInvalid(format!("p_err = {p_err} is not a probability")));
        }
        let corruption = Corruption { p_err, seed: seed::derive(master_seed, i as u64) };
        let accuracy = evaluate(&result.state.model, &data, core.as_ref(), Some(&corruption))
            .map_err(experiment_error)?;
        println!("  p_err={p_err:<10} accuracy={accuracy:.4}");
        csv.row(&[fmt_f64(p_err), fmt_f64(accuracy)]);
    }
    let path = ctx.out_dir.join("noise_sweep.csv");
    write_atomic(&path, &csv.into_bytes())?;
    println!("  wrote {}", path.display());
    Ok(())
}
