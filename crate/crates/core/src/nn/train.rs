//! Full-batch SGD training with momentum on the f32 master weights.

use super::data::Dataset;
use super::gemm::Corruption;
use super::model::{evaluate, softmax_cross_entropy, Gradients, LayerGrad, Model, ModelSpec};
use super::tensor::Tensor;
use super::NnError;
use crate::analog::{quantize_symmetric, CoreConfig};

/// Optimizer state. The model inside holds the f32 master weights, which
/// are only ever quantized on the fly inside GEMMs, never in place.
#[derive(Debug, Clone)]
pub struct TrainState {
    pub model: Model,
    pub learning_rate: f32,
    pub momentum: f32,
    pub seed: u64,
    velocities: Vec<(Tensor, Vec<f32>)>,
}

impl TrainState {
    pub fn new(model: Model, learning_rate: f32, momentum: f32, seed: u64) -> Self {
        let velocities = model
            .param_tensors()
            .iter()
            .map(|(t, b)| (Tensor::zeros(t.dims()), vec![0.0; b.len()]))
            .collect();
        Self { model, learning_rate, momentum, seed, velocities }
    }
}

/// One momentum step on the master weights:
/// `v <- mu * v + g`, `w <- w - eta * v`, all in f32.
pub fn sgd_step(state: &mut TrainState, grads: &Gradients) {
    let eta = state.learning_rate;
    let mu = state.momentum;
    let mut vel_iter = state.velocities.iter_mut();
    let mut grad_iter = grads.layers.iter();
    for (weight, bias) in state.model.params_mut() {
        let (vel_w, vel_b) = vel_iter.next().expect("velocity per parameterized layer");
        let g = loop {
            match grad_iter.next() {
                Some(LayerGrad::Dense { d_weight, d_bias }) => break (d_weight, d_bias),
                Some(LayerGrad::None) => continue,
                None => panic!("gradient list shorter than parameter list"),
            }
        };
        for ((w, v), &dw) in weight.data_mut().iter_mut().zip(vel_w.data_mut()).zip(g.0.data()) {
            *v = mu * *v + dw;
            *w -= eta * *v;
        }
        for ((b, v), &db) in bias.iter_mut().zip(vel_b.iter_mut()).zip(g.1) {
            *v = mu * *v + db;
            *b -= eta * *v;
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub steps: usize,
    pub learning_rate: f32,
    pub momentum: f32,
    pub seed: u64,
    /// Record loss/accuracy every this many steps (and at the last step).
    pub record_every: usize,
    /// Ablation: when set, parameters are re-quantized in place to this
    /// many bits after every update, i.e. the f32 master copy is disabled.
    pub quantize_master_bits: Option<u32>,
    /// Bernoulli output corruption applied inside every GEMM.
    pub corruption_p: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            steps: 200,
            learning_rate: 0.1,
            momentum: 0.9,
            seed: 1,
            record_every: 25,
            quantize_master_bits: None,
            corruption_p: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryPoint {
    pub step: usize,
    pub loss: f32,
    pub accuracy: f64,
}

#[derive(Debug)]
pub struct TrainResult {
    pub state: TrainState,
    pub history: Vec<HistoryPoint>,
    pub final_accuracy: f64,
}

/// Full-batch training of `spec` on `data`. Entirely deterministic given
/// the config: initialization, data order, and corruption streams are all
/// seed-derived.
pub fn train(
    spec: &ModelSpec,
    data: &Dataset,
    core: Option<&CoreConfig>,
    cfg: &TrainConfig,
) -> Result<TrainResult, NnError> {
    let model = Model::init(spec, cfg.seed);
    let mut state = TrainState::new(model, cfg.learning_rate, cfg.momentum, cfg.seed);
    let x = data.model_input()?;
    let mut history = Vec::new();
    for step in 0..cfg.steps {
        let corr_fwd = cfg.corruption_p.map(|p| Corruption {
            p_err: p,
            seed: crate::seed::derive_n(cfg.seed, &[step as u64, 0]),
        });
        let corr_bwd = cfg.corruption_p.map(|p| Corruption {
            p_err: p,
            seed: crate::seed::derive_n(cfg.seed, &[step as u64, 1]),
        });
        let trace = state.model.forward(&x, core, corr_fwd.as_ref())?;
        let (loss, grad_logits) = softmax_cross_entropy(&trace.logits, &data.labels);
        let (grads, _) = state.model.backward(&trace, &grad_logits, core, corr_bwd.as_ref())?;
        sgd_step(&mut state, &grads);
        if let Some(bits) = cfg.quantize_master_bits {
            requantize_parameters(&mut state.model, bits)?;
        }
        if step % cfg.record_every == 0 || step + 1 == cfg.steps {
            let accuracy = evaluate(&state.model, data, core, None)?;
            history.push(HistoryPoint { step, loss, accuracy });
        }
    }
    let final_accuracy = evaluate(&state.model, data, core, None)?;
    Ok(TrainResult { state, history, final_accuracy })
}

/// Replaces every parameter row (output unit) by its quantize-dequantize
/// image, emulating hardware that stores weights in integer form between
/// steps.
fn requantize_parameters(model: &mut Model, bits: u32) -> Result<(), NnError> {
    for (weight, _bias) in model.params_mut() {
        let rows = weight.dims()[0];
        let row_len = weight.len() / rows;
        for row in weight.data_mut().chunks_mut(row_len) {
            let q = quantize_symmetric(row, bits)?;
            row.copy_from_slice(&q.dequantize());
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::data::{synth_dataset, SynthKind};
    use crate::nn::model::LayerSpec;

    fn linear_spec() -> ModelSpec {
        ModelSpec { layers: vec![LayerSpec::Linear { inputs: 2, outputs: 2 }] }
    }

    #[test]
    fn zero_learning_rate_freezes_weights() {
        let data = synth_dataset(SynthKind::Blobs, 32, 3);
        let spec = linear_spec();
        let cfg = TrainConfig { steps: 5, learning_rate: 0.0, ..Default::default() };
        let result = train(&spec, &data, None, &cfg).unwrap();
        let fresh = Model::init(&spec, cfg.seed);
        for (a, b) in result.state.model.parameters().iter().zip(fresh.parameters()) {
            assert_eq!(a.data(), b.data());
        }
    }

    #[test]
    fn single_step_without_momentum_is_plain_sgd() {
        let data = synth_dataset(SynthKind::Blobs, 32, 3);
        let spec = linear_spec();
        let model = Model::init(&spec, 7);
        let x = data.model_input().unwrap();
        let trace = model.forward(&x, None, None).unwrap();
        let (_, grad_logits) = softmax_cross_entropy(&trace.logits, &data.labels);
        let (grads, _) = model.backward(&trace, &grad_logits, None, None).unwrap();

        let mut state = TrainState::new(model.clone(), 0.5, 0.0, 7);
        sgd_step(&mut state, &grads);
        let LayerGrad::Dense { d_weight, .. } = &grads.layers[0] else { panic!() };
        for ((new, old), &g) in state.model.parameters()[0]
            .data()
            .iter()
            .zip(model.parameters()[0].data())
            .zip(d_weight.data())
        {
            assert_eq!(*new, old - 0.5 * g);
        }
    }

    #[test]
    fn one_layer_model_converges_on_separable_data() {
        // Float-only convergence oracle for the optimizer path.
        let data = synth_dataset(SynthKind::Blobs, 128, 5);
        let cfg = TrainConfig { steps: 200, learning_rate: 0.1, momentum: 0.0, ..Default::default() };
        let result = train(&linear_spec(), &data, None, &cfg).unwrap();
        assert!(
            result.final_accuracy >= 0.95,
            "linear model reached only {}",
            result.final_accuracy
        );
    }
}
