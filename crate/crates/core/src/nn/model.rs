//! Layer definitions, forward/backward passes, and the softmax head.
//!
//! Forward GEMMs quantize their operands on the way in; backward GEMMs
//! quantize the incoming activation gradients the same way, so every GEMM
//! sees freshly quantized operands while bias adds, ReLU, softmax and the
//! loss stay in f32.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::data::Dataset;
use super::gemm::{col2im, conv2d_as_gemm, im2col, tiled_gemm, Corruption};
use super::tensor::Tensor;
use super::NnError;
use crate::analog::CoreConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerSpec {
    Linear { inputs: usize, outputs: usize },
    Conv2d { in_channels: usize, out_channels: usize, kernel: usize, stride: usize },
    Relu,
    Flatten,
}

/// Ordered layer list; training attaches a softmax cross-entropy head.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSpec {
    pub layers: Vec<LayerSpec>,
}

#[derive(Debug, Clone)]
enum LayerState {
    Linear { weight: Tensor, bias: Vec<f32> },
    Conv2d { kernels: Tensor, bias: Vec<f32>, stride: usize },
    Relu,
    Flatten,
}

/// A model instance holding f32 master parameters. Parameters are never
/// quantized in place; cores see quantized copies inside each GEMM.
#[derive(Debug, Clone)]
pub struct Model {
    spec: ModelSpec,
    layers: Vec<LayerState>,
}

/// Per-layer parameter gradients, aligned with the model's layers.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub layers: Vec<LayerGrad>,
}

#[derive(Debug, Clone)]
pub enum LayerGrad {
    Dense { d_weight: Tensor, d_bias: Vec<f32> },
    None,
}

/// Cached per-layer inputs from a forward pass, plus the logits.
#[derive(Debug, Clone)]
pub struct ForwardTrace {
    inputs: Vec<Tensor>,
    pub logits: Tensor,
}

impl ForwardTrace {
    /// The activation tensor that entered layer `i`.
    pub fn layer_input(&self, i: usize) -> &Tensor {
        &self.inputs[i]
    }

    pub fn layer_count(&self) -> usize {
        self.inputs.len()
    }
}

impl Model {
    /// Deterministic initialization: weights are normal with a
    /// fan-in-scaled deviation, biases start at zero.
    pub fn init(spec: &ModelSpec, seed: u64) -> Model {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = spec
            .layers
            .iter()
            .map(|layer| match *layer {
                LayerSpec::Linear { inputs, outputs } => {
                    let std = (2.0 / inputs as f64).sqrt();
                    let dist = Normal::new(0.0, std).unwrap();
                    let data: Vec<f32> =
                        (0..inputs * outputs).map(|_| dist.sample(&mut rng) as f32).collect();
                    LayerState::Linear {
                        weight: Tensor::from_vec(&[outputs, inputs], data).unwrap(),
                        bias: vec![0.0; outputs],
                    }
                }
                LayerSpec::Conv2d { in_channels, out_channels, kernel, stride } => {
                    let fan_in = in_channels * kernel * kernel;
                    let std = (2.0 / fan_in as f64).sqrt();
                    let dist = Normal::new(0.0, std).unwrap();
                    let data: Vec<f32> =
                        (0..out_channels * fan_in).map(|_| dist.sample(&mut rng) as f32).collect();
                    LayerState::Conv2d {
                        kernels: Tensor::from_vec(
                            &[out_channels, in_channels, kernel, kernel],
                            data,
                        )
                        .unwrap(),
                        bias: vec![0.0; out_channels],
                        stride,
                    }
                }
                LayerSpec::Relu => LayerState::Relu,
                LayerSpec::Flatten => LayerState::Flatten,
            })
            .collect();
        Model { spec: spec.clone(), layers }
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    /// Flat views of every parameter tensor, in layer order.
    pub fn parameters(&self) -> Vec<&Tensor> {
        self.layers
            .iter()
            .filter_map(|l| match l {
                LayerState::Linear { weight, .. } => Some(weight),
                LayerState::Conv2d { kernels, .. } => Some(kernels),
                _ => None,
            })
            .collect()
    }

    pub(crate) fn params_mut(&mut self) -> Vec<(&mut Tensor, &mut Vec<f32>)> {
        self.layers
            .iter_mut()
            .filter_map(|l| match l {
                LayerState::Linear { weight, bias } => Some((weight, bias)),
                LayerState::Conv2d { kernels, bias, .. } => Some((kernels, bias)),
                _ => None,
            })
            .collect()
    }

    pub(crate) fn param_tensors(&self) -> Vec<(&Tensor, &Vec<f32>)> {
        self.layers
            .iter()
            .filter_map(|l| match l {
                LayerState::Linear { weight, bias } => Some((weight, bias)),
                LayerState::Conv2d { kernels, bias, .. } => Some((kernels, bias)),
                _ => None,
            })
            .collect()
    }

    pub(crate) fn set_params(&mut self, tensors: Vec<(Tensor, Vec<f32>)>) {
        let mut it = tensors.into_iter();
        for layer in &mut self.layers {
            match layer {
                LayerState::Linear { weight, bias } | LayerState::Conv2d { kernels: weight, bias, .. } => {
                    let (w, b) = it.next().expect("one entry per parameterized layer");
                    *weight = w;
                    *bias = b;
                }
                _ => {}
            }
        }
    }

    /// Runs the layers on `x` and caches every layer input for backward.
    /// MLP inputs are `[features, batch]`; convolutional inputs are
    /// `[batch, channels, height, width]`.
    pub fn forward(
        &self,
        x: &Tensor,
        core: Option<&CoreConfig>,
        corruption: Option<&Corruption>,
    ) -> Result<ForwardTrace, NnError> {
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut cur = x.clone();
        for (li, layer) in self.layers.iter().enumerate() {
            inputs.push(cur.clone());
            cur = match layer {
                LayerState::Linear { weight, bias } => {
                    let corr = corruption.map(|c| Corruption {
                        p_err: c.p_err,
                        seed: crate::seed::derive_n(c.seed, &[li as u64, 0]),
                    });
                    let mut o = tiled_gemm(weight, &cur, core, corr.as_ref())?;
                    add_row_bias(&mut o, bias);
                    o
                }
                LayerState::Conv2d { kernels, bias, stride } => {
                    let corr = corruption.map(|c| Corruption {
                        p_err: c.p_err,
                        seed: crate::seed::derive_n(c.seed, &[li as u64, 0]),
                    });
                    let mut o = conv2d_as_gemm(&cur, kernels, *stride, core, corr.as_ref())?;
                    add_channel_bias(&mut o, bias);
                    o
                }
                LayerState::Relu => cur.map(|v| v.max(0.0)),
                LayerState::Flatten => flatten_to_columns(&cur)?,
            };
        }
        Ok(ForwardTrace { inputs, logits: cur })
    }

    /// Backpropagates `grad_logits`, returning parameter gradients and the
    /// gradient with respect to the model input.
    pub fn backward(
        &self,
        trace: &ForwardTrace,
        grad_logits: &Tensor,
        core: Option<&CoreConfig>,
        corruption: Option<&Corruption>,
    ) -> Result<(Gradients, Tensor), NnError> {
        let mut grad = grad_logits.clone();
        let mut layer_grads = vec![LayerGrad::None; self.layers.len()];
        for (li, layer) in self.layers.iter().enumerate().rev() {
            let input = &trace.inputs[li];
            grad = match layer {
                LayerState::Linear { weight, .. } => {
                    let corr_w = corruption.map(|c| Corruption {
                        p_err: c.p_err,
                        seed: crate::seed::derive_n(c.seed, &[li as u64, 1]),
                    });
                    let corr_x = corruption.map(|c| Corruption {
                        p_err: c.p_err,
                        seed: crate::seed::derive_n(c.seed, &[li as u64, 2]),
                    });
                    let d_weight = tiled_gemm(&grad, &input.transpose2d(), core, corr_w.as_ref())?;
                    let d_bias = row_sums(&grad);
                    let d_input =
                        tiled_gemm(&weight.transpose2d(), &grad, core, corr_x.as_ref())?;
                    layer_grads[li] = LayerGrad::Dense { d_weight, d_bias };
                    d_input
                }
                LayerState::Conv2d { kernels, stride, .. } => {
                    let corr_w = corruption.map(|c| Corruption {
                        p_err: c.p_err,
                        seed: crate::seed::derive_n(c.seed, &[li as u64, 1]),
                    });
                    let corr_x = corruption.map(|c| Corruption {
                        p_err: c.p_err,
                        seed: crate::seed::derive_n(c.seed, &[li as u64, 2]),
                    });
                    let &[n, cout, oh, ow] = grad.dims() else {
                        return Err(NnError::ShapeMismatch("conv grad needs [n,c,h,w]".into()));
                    };
                    let &[_, cin, _, _] = input.dims() else {
                        return Err(NnError::ShapeMismatch("conv input needs [n,c,h,w]".into()));
                    };
                    let kernel = kernels.dims()[2];
                    // Flatten grad to [cout, n*oh*ow] matching im2col column order.
                    let gmat = conv_grad_matrix(&grad, n, cout, oh, ow);
                    let patches = im2col(input, (kernel, kernel), *stride)?;
                    let d_kernels_flat =
                        tiled_gemm(&gmat, &patches.transpose2d(), core, corr_w.as_ref())?;
                    let d_kernels =
                        d_kernels_flat.reshape(&[cout, cin, kernel, kernel])?;
                    let d_bias = row_sums(&gmat);
                    let d_patches =
                        tiled_gemm(&kernels.reshape(&[cout, cin * kernel * kernel])?.transpose2d(), &gmat, core, corr_x.as_ref())?;
                    let d_input = col2im(&d_patches, input.dims(), (kernel, kernel), *stride)?;
                    layer_grads[li] = LayerGrad::Dense { d_weight: d_kernels, d_bias };
                    d_input
                }
                LayerState::Relu => {
                    let mut g = grad.clone();
                    for (gv, &iv) in g.data_mut().iter_mut().zip(input.data()) {
                        if iv <= 0.0 {
                            *gv = 0.0;
                        }
                    }
                    g
                }
                LayerState::Flatten => {
                    // Undo the [features, batch] projection.
                    unflatten_from_columns(&grad, input.dims())?
                }
            };
        }
        Ok((Gradients { layers: layer_grads }, grad))
    }
}

fn add_row_bias(t: &mut Tensor, bias: &[f32]) {
    let cols = t.cols();
    debug_assert_eq!(t.rows(), bias.len());
    for (row, &b) in t.data_mut().chunks_mut(cols).zip(bias) {
        for v in row {
            *v += b;
        }
    }
}

fn add_channel_bias(t: &mut Tensor, bias: &[f32]) {
    let &[n, cch, h, w] = t.dims() else { unreachable!("conv output is 4-D") };
    debug_assert_eq!(cch, bias.len());
    let data = t.data_mut();
    for s in 0..n {
        for c in 0..cch {
            for i in 0..h * w {
                data[(s * cch + c) * h * w + i] += bias[c];
            }
        }
    }
}

fn row_sums(t: &Tensor) -> Vec<f32> {
    (0..t.rows()).map(|r| t.row(r).iter().sum()).collect()
}

/// `[n, c, h, w] -> [c*h*w, n]`: one feature column per sample.
fn flatten_to_columns(t: &Tensor) -> Result<Tensor, NnError> {
    let &[n, c, h, w] = t.dims() else {
        return Err(NnError::ShapeMismatch("flatten needs [n, c, h, w]".into()));
    };
    let features = c * h * w;
    let mut out = Tensor::zeros(&[features, n]);
    for s in 0..n {
        for f in 0..features {
            out.data_mut()[f * n + s] = t.data()[s * features + f];
        }
    }
    Ok(out)
}

fn unflatten_from_columns(t: &Tensor, dims: &[usize]) -> Result<Tensor, NnError> {
    let &[n, c, h, w] = dims else {
        return Err(NnError::ShapeMismatch("unflatten needs [n, c, h, w]".into()));
    };
    let features = c * h * w;
    if t.dims() != [features, n] {
        return Err(NnError::ShapeMismatch("column matrix does not match target dims".into()));
    }
    let mut out = Tensor::zeros(dims);
    for s in 0..n {
        for f in 0..features {
            out.data_mut()[s * features + f] = t.data()[f * n + s];
        }
    }
    Ok(out)
}

/// `[n, cout, oh, ow] -> [cout, n*oh*ow]` with im2col's column order.
fn conv_grad_matrix(grad: &Tensor, n: usize, cout: usize, oh: usize, ow: usize) -> Tensor {
    let mut out = Tensor::zeros(&[cout, n * oh * ow]);
    for s in 0..n {
        for c in 0..cout {
            for i in 0..oh * ow {
                let v = grad.data()[(s * cout + c) * oh * ow + i];
                out.data_mut()[c * (n * oh * ow) + s * oh * ow + i] = v;
            }
        }
    }
    out
}

/// Mean softmax cross-entropy over `[classes, batch]` logits, with the
/// gradient already divided by the batch size.
pub fn softmax_cross_entropy(logits: &Tensor, labels: &[u32]) -> (f32, Tensor) {
    let (classes, batch) = (logits.rows(), logits.cols());
    assert_eq!(batch, labels.len(), "one label per column");
    let mut grad = Tensor::zeros(&[classes, batch]);
    let mut loss = 0f64;
    for (s, &label) in labels.iter().enumerate() {
        let col: Vec<f32> = (0..classes).map(|c| logits.at(c, s)).collect();
        let max = col.iter().cloned().fold(f32::NEG_INFINITY, f32::max);
        let exps: Vec<f32> = col.iter().map(|&v| (v - max).exp()).collect();
        let sum: f32 = exps.iter().sum();
        let label = label as usize;
        assert!(label < classes, "label {label} outside {classes} classes");
        loss -= ((exps[label] / sum) as f64).max(1e-30).ln();
        for (c, &e) in exps.iter().enumerate() {
            let p = e / sum;
            let target = if c == label { 1.0 } else { 0.0 };
            grad.set(c, s, (p - target) / batch as f32);
        }
    }
    ((loss / batch as f64) as f32, grad)
}

/// Fraction of samples whose argmax logit matches the label.
pub fn evaluate(
    model: &Model,
    data: &Dataset,
    core: Option<&CoreConfig>,
    corruption: Option<&Corruption>,
) -> Result<f64, NnError> {
    assert!(!data.is_empty(), "cannot evaluate on an empty dataset");
    let x = data.model_input()?;
    let trace = model.forward(&x, core, corruption)?;
    let logits = &trace.logits;
    let mut hits = 0usize;
    for s in 0..data.len() {
        let mut best = 0usize;
        for c in 1..logits.rows() {
            if logits.at(c, s) > logits.at(best, s) {
                best = c;
            }
        }
        if best as u32 == data.labels[s] {
            hits += 1;
        }
    }
    Ok(hits as f64 / data.len() as f64)
}
