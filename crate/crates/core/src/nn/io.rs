//! Dataset and model files: the big-endian IDX image/label format and the
//! "RNST" little-endian weights format.
//!
//! Weights layout: the 4-byte magic `RNST`, then for every parameter
//! tensor in layer order (weight tensor, then its bias as a rank-1
//! tensor): `u32` rank, `u32` dims, `f32` payload, all little-endian.

use std::fs;
use std::path::Path;

use super::data::Dataset;
use super::model::{Model, ModelSpec};
use super::tensor::Tensor;
use super::NnError;

const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;
const IDX_LABELS_MAGIC: u32 = 0x0000_0801;
const WEIGHTS_MAGIC: &[u8; 4] = b"RNST";

fn read_be_u32(bytes: &[u8], offset: usize) -> Result<u32, NnError> {
    let end = offset + 4;
    if bytes.len() < end {
        return Err(NnError::TruncatedFile { want: end, got: bytes.len() });
    }
    Ok(u32::from_be_bytes(bytes[offset..end].try_into().unwrap()))
}

/// Parses an IDX image file and its label file into a dataset with pixels
/// normalized to `[0, 1]` and shape `[n, 1, rows, cols]`.
pub fn load_idx_dataset(images_path: &Path, labels_path: &Path) -> Result<Dataset, NnError> {
    let img_bytes = fs::read(images_path)?;
    let magic = read_be_u32(&img_bytes, 0)?;
    if magic != IDX_IMAGES_MAGIC {
        return Err(NnError::BadMagic { got: magic, want: IDX_IMAGES_MAGIC });
    }
    let n = read_be_u32(&img_bytes, 4)? as usize;
    let rows = read_be_u32(&img_bytes, 8)? as usize;
    let cols = read_be_u32(&img_bytes, 12)? as usize;
    let want = 16 + n * rows * cols;
    if img_bytes.len() < want {
        return Err(NnError::TruncatedFile { want, got: img_bytes.len() });
    }
    let pixels: Vec<f32> = img_bytes[16..want].iter().map(|&b| b as f32 / 255.0).collect();

    let lbl_bytes = fs::read(labels_path)?;
    let magic = read_be_u32(&lbl_bytes, 0)?;
    if magic != IDX_LABELS_MAGIC {
        return Err(NnError::BadMagic { got: magic, want: IDX_LABELS_MAGIC });
    }
    let n_labels = read_be_u32(&lbl_bytes, 4)? as usize;
    let want = 8 + n_labels;
    if lbl_bytes.len() < want {
        return Err(NnError::TruncatedFile { want, got: lbl_bytes.len() });
    }
    if n_labels != n {
        return Err(NnError::CountMismatch { images: n, labels: n_labels });
    }
    let labels: Vec<u32> = lbl_bytes[8..want].iter().map(|&b| b as u32).collect();
    let classes = labels.iter().copied().max().unwrap_or(0) as usize + 1;
    Ok(Dataset {
        inputs: Tensor::from_vec(&[n, 1, rows, cols], pixels)?,
        labels,
        classes,
    })
}

/// Writes `n` row-major `rows x cols` byte images in IDX format.
pub fn write_idx_images(
    path: &Path,
    n: usize,
    rows: usize,
    cols: usize,
    pixels: &[u8],
) -> Result<(), NnError> {
    assert_eq!(pixels.len(), n * rows * cols);
    let mut bytes = Vec::with_capacity(16 + pixels.len());
    bytes.extend_from_slice(&IDX_IMAGES_MAGIC.to_be_bytes());
    bytes.extend_from_slice(&(n as u32).to_be_bytes());
    bytes.extend_from_slice(&(rows as u32).to_be_bytes());
    bytes.extend_from_slice(&(cols as u32).to_be_bytes());
    bytes.extend_from_slice(pixels);
    fs::write(path, bytes)?;
    Ok(())
}

pub fn write_idx_labels(path: &Path, labels: &[u8]) -> Result<(), NnError> {
    let mut bytes = Vec::with_capacity(8 + labels.len());
    bytes.extend_from_slice(&IDX_LABELS_MAGIC.to_be_bytes());
    bytes.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    bytes.extend_from_slice(labels);
    fs::write(path, bytes)?;
    Ok(())
}

/// Serializes the model parameters in layer order.
pub fn save_weights(model: &Model, path: &Path) -> Result<(), NnError> {
    let mut bytes = Vec::new();
    bytes.extend_from_slice(WEIGHTS_MAGIC);
    for (tensor, bias) in model.param_tensors() {
        push_tensor(&mut bytes, tensor.dims(), tensor.data());
        push_tensor(&mut bytes, &[bias.len()], bias);
    }
    fs::write(path, bytes)?;
    Ok(())
}

fn push_tensor(bytes: &mut Vec<u8>, dims: &[usize], data: &[f32]) {
    bytes.extend_from_slice(&(dims.len() as u32).to_le_bytes());
    for &d in dims {
        bytes.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for &v in data {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
}

/// Rebuilds a model from a weights file, validating shapes against `spec`.
pub fn load_weights(spec: &ModelSpec, path: &Path) -> Result<Model, NnError> {
    let bytes = fs::read(path)?;
    if bytes.len() < 4 {
        return Err(NnError::TruncatedFile { want: 4, got: bytes.len() });
    }
    if &bytes[..4] != WEIGHTS_MAGIC {
        let got = u32::from_be_bytes(bytes[..4].try_into().unwrap());
        let want = u32::from_be_bytes(*WEIGHTS_MAGIC);
        return Err(NnError::BadMagic { got, want });
    }
    let mut offset = 4;
    let mut model = Model::init(spec, 0);
    let mut loaded = Vec::new();
    for (expected, bias) in model.param_tensors() {
        let tensor = read_tensor(&bytes, &mut offset)?;
        if tensor.dims() != expected.dims() {
            return Err(NnError::ShapeMismatch(format!(
                "weights file has {:?}, model expects {:?}",
                tensor.dims(),
                expected.dims()
            )));
        }
        let bias_tensor = read_tensor(&bytes, &mut offset)?;
        if bias_tensor.dims() != [bias.len()] {
            return Err(NnError::ShapeMismatch(format!(
                "bias of {} entries, model expects {}",
                bias_tensor.len(),
                bias.len()
            )));
        }
        loaded.push((tensor, bias_tensor.data().to_vec()));
    }
    model.set_params(loaded);
    Ok(model)
}

fn read_tensor(bytes: &[u8], offset: &mut usize) -> Result<Tensor, NnError> {
    let rank = read_le_u32(bytes, offset)? as usize;
    let mut dims = Vec::with_capacity(rank);
    for _ in 0..rank {
        dims.push(read_le_u32(bytes, offset)? as usize);
    }
    let count: usize = dims.iter().product();
    let want = *offset + count * 4;
    if bytes.len() < want {
        return Err(NnError::TruncatedFile { want, got: bytes.len() });
    }
    let data: Vec<f32> = bytes[*offset..want]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    *offset = want;
    Tensor::from_vec(&dims, data)
}

fn read_le_u32(bytes: &[u8], offset: &mut usize) -> Result<u32, NnError> {
    let end = *offset + 4;
    if bytes.len() < end {
        return Err(NnError::TruncatedFile { want: end, got: bytes.len() });
    }
    let v = u32::from_le_bytes(bytes[*offset..end].try_into().unwrap());
    *offset = end;
    Ok(v)
}
