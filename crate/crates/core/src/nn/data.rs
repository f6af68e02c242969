//! Labeled datasets: deterministic synthetic generators plus the loaded
//! form shared with the IDX reader.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::tensor::Tensor;
use super::NnError;

/// Samples with integer class labels. `inputs` is `[n, features]` for flat
/// data or `[n, c, h, w]` for images.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub inputs: Tensor,
    pub labels: Vec<u32>,
    pub classes: usize,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// The tensor a model consumes: `[features, batch]` columns for flat
    /// data, the raw `[n, c, h, w]` layout for images.
    pub fn model_input(&self) -> Result<Tensor, NnError> {
        match self.inputs.dims().len() {
            2 => Ok(self.inputs.transpose2d()),
            4 => Ok(self.inputs.clone()),
            d => Err(NnError::ShapeMismatch(format!("unsupported input rank {d}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthKind {
    /// Two well-separated Gaussian blobs (class means 7 sigma apart per
    /// axis); linearly separable with overwhelming probability.
    Blobs,
    /// Four tight clusters in an XOR arrangement; not linearly separable.
    Xor,
}

impl SynthKind {
    pub fn name(self) -> &'static str {
        match self {
            SynthKind::Blobs => "blobs",
            SynthKind::Xor => "xor",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "blobs" => Some(SynthKind::Blobs),
            "xor" => Some(SynthKind::Xor),
            _ => None,
        }
    }
}

/// Deterministic labeled 2-D data for convergence tests.
pub fn synth_dataset(kind: SynthKind, n_samples: usize, seed: u64) -> Dataset {
    assert!(n_samples >= 2, "need at least two samples");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = Normal::new(0.0f64, 1.0).unwrap();
    let mut rows: Vec<([f32; 2], u32)> = Vec::with_capacity(n_samples);
    match kind {
        SynthKind::Blobs => {
            for i in 0..n_samples {
                let label = (i % 2) as u32;
                let center = if label == 0 { 3.5 } else { -3.5 };
                let x = center + unit.sample(&mut rng);
                let y = center + unit.sample(&mut rng);
                rows.push(([x as f32, y as f32], label));
            }
        }
        SynthKind::Xor => {
            for i in 0..n_samples {
                let corner = i % 4;
                let (cx, cy) = match corner {
                    0 => (1.0, 1.0),
                    1 => (-1.0, -1.0),
                    2 => (1.0, -1.0),
                    _ => (-1.0, 1.0),
                };
                let label = if corner < 2 { 0 } else { 1 };
                let x = cx + 0.25 * unit.sample(&mut rng);
                let y = cy + 0.25 * unit.sample(&mut rng);
                rows.push(([x as f32, y as f32], label));
            }
        }
    }
    rows.shuffle(&mut rng);
    let mut data = Vec::with_capacity(n_samples * 2);
    let mut labels = Vec::with_capacity(n_samples);
    for (xy, label) in rows {
        data.extend_from_slice(&xy);
        labels.push(label);
    }
    Dataset {
        inputs: Tensor::from_vec(&[n_samples, 2], data).expect("length matches"),
        labels,
        classes: 2,
    }
}
