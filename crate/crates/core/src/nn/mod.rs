//! Desk-scale neural-network inference and training on simulated cores.
//!
//! GEMM layers run tile-by-tile on an analog core model with dynamic
//! per-row / per-vector scaling; everything that is not a GEMM (bias,
//! nonlinearities, softmax, the optimizer step) stays in 32-bit float.

mod data;
mod gemm;
mod io;
mod model;
mod tensor;
mod train;

pub use data::{synth_dataset, Dataset, SynthKind};
pub use gemm::{conv2d_as_gemm, tiled_gemm, Corruption};
pub use io::{load_idx_dataset, load_weights, save_weights, write_idx_images, write_idx_labels};
pub use model::{
    evaluate, softmax_cross_entropy, ForwardTrace, Gradients, LayerGrad, LayerSpec, Model,
    ModelSpec,
};
pub use tensor::Tensor;
pub use train::{sgd_step, train, HistoryPoint, TrainConfig, TrainResult, TrainState};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NnError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("bad magic number {got:#010x}, expected {want:#010x}")]
    BadMagic { got: u32, want: u32 },
    #[error("file truncated: wanted {want} bytes, found {got}")]
    TruncatedFile { want: usize, got: usize },
    #[error("image count {images} does not match label count {labels}")]
    CountMismatch { images: usize, labels: usize },
    #[error(transparent)]
    Analog(#[from] crate::analog::AnalogError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
