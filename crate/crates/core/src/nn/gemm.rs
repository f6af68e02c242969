//! Tiled GEMM on a simulated analog core, and convolution lowering.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::tensor::Tensor;
use super::NnError;
use crate::analog::{
    corrupt_outputs, mvm_hp, mvm_lp, mvm_rns, quantize_symmetric, CoreConfig, CoreKind,
    QuantizedVector,
};
use crate::seed;

/// Bernoulli output corruption applied after every tile MVM. Seeds are
/// derived per (row tile, inner tile, column), so results do not depend on
/// the evaluation order or thread count.
#[derive(Debug, Clone, Copy)]
pub struct Corruption {
    pub p_err: f64,
    pub seed: u64,
}

/// `A (m x k) * B (k x n)` computed tile-by-tile on the core model.
///
/// Operands are split into `h`-sized chunks; each weight chunk row and each
/// input chunk get one dynamic scale (`h + 1` scales per tile MVM), are
/// quantized to `b_dac` bits, and run through the core. Partial outputs are
/// rescaled and accumulated in f32. Chunks shorter than `h` are equivalent
/// to zero padding and keep pad elements out of the scales.
///
/// `core = None` is the f32 reference path: a plain float GEMM with no
/// quantization and no corruption.
pub fn tiled_gemm(
    a: &Tensor,
    b: &Tensor,
    core: Option<&CoreConfig>,
    corruption: Option<&Corruption>,
) -> Result<Tensor, NnError> {
    if a.dims().len() != 2 || b.dims().len() != 2 {
        return Err(NnError::ShapeMismatch("tiled_gemm needs 2-D operands".into()));
    }
    let (m, ka) = (a.rows(), a.cols());
    let (kb, n) = (b.rows(), b.cols());
    if ka != kb {
        return Err(NnError::ShapeMismatch(format!(
            "inner dims differ: {m}x{ka} * {kb}x{n}"
        )));
    }
    let Some(cfg) = core else {
        return Ok(reference_gemm(a, b));
    };

    let h = cfg.h() as usize;
    let row_tiles = m.div_ceil(h);
    let inner_tiles = ka.div_ceil(h);

    // Quantize every weight tile once: tiles[rt][kt] holds the rows of the
    // (rt, kt) chunk with one scale per row.
    let mut tiles: Vec<Vec<Vec<QuantizedVector>>> = Vec::with_capacity(row_tiles);
    for rt in 0..row_tiles {
        let r_end = ((rt + 1) * h).min(m);
        let mut per_inner = Vec::with_capacity(inner_tiles);
        for kt in 0..inner_tiles {
            let k_end = ((kt + 1) * h).min(ka);
            let rows: Result<Vec<QuantizedVector>, _> = (rt * h..r_end)
                .map(|r| quantize_symmetric(&a.row(r)[kt * h..k_end], cfg.b_dac()))
                .collect();
            per_inner.push(rows?);
        }
        tiles.push(per_inner);
    }

    let bt = b.transpose2d(); // columns of B as contiguous rows
    let columns: Result<Vec<Vec<f32>>, NnError> = (0..n)
        .into_par_iter()
        .map(|c| {
            let mut out_col = vec![0f32; m];
            for kt in 0..inner_tiles {
                let k_end = ((kt + 1) * h).min(ka);
                let x = quantize_symmetric(&bt.row(c)[kt * h..k_end], cfg.b_dac())?;
                for (rt, tile_rows) in tiles.iter().enumerate() {
                    let rows = &tile_rows[kt];
                    let mut tile_out = match cfg.kind() {
                        CoreKind::Hp => mvm_hp(rows, &x, cfg)?,
                        CoreKind::Lp => mvm_lp(rows, &x, cfg)?,
                        CoreKind::Rns => mvm_rns(rows, &x, cfg)?,
                    };
                    if let Some(corr) = corruption {
                        let tile_seed =
                            seed::derive_n(corr.seed, &[rt as u64, kt as u64, c as u64]);
                        let mut rng = ChaCha8Rng::seed_from_u64(tile_seed);
                        (tile_out, _) = corrupt_outputs(&tile_out, cfg, corr.p_err, &mut rng);
                    }
                    for (i, &v) in tile_out.as_float.iter().enumerate() {
                        out_col[rt * h + i] += v;
                    }
                }
            }
            Ok(out_col)
        })
        .collect();
    let columns = columns?;

    let mut out = Tensor::zeros(&[m, n]);
    for (c, col) in columns.iter().enumerate() {
        for (r, &v) in col.iter().enumerate() {
            out.set(r, c, v);
        }
    }
    Ok(out)
}

fn reference_gemm(a: &Tensor, b: &Tensor) -> Tensor {
    let (m, k) = (a.rows(), a.cols());
    let n = b.cols();
    let mut out = Tensor::zeros(&[m, n]);
    for r in 0..m {
        for c in 0..n {
            let mut acc = 0f32;
            for i in 0..k {
                acc += a.at(r, i) * b.at(i, c);
            }
            out.set(r, c, acc);
        }
    }
    out
}

/// Output spatial size of a valid (unpadded) convolution.
pub(crate) fn conv_out_dim(input: usize, kernel: usize, stride: usize) -> usize {
    (input - kernel) / stride + 1
}

/// Lowers a batched convolution input `[n, cin, ih, iw]` to the patch
/// matrix `[cin*kh*kw, n*oh*ow]` (columns ordered sample-major, then by
/// output row and column).
pub(crate) fn im2col(
    input: &Tensor,
    kernel: (usize, usize),
    stride: usize,
) -> Result<Tensor, NnError> {
    let &[n, cin, ih, iw] = input.dims() else {
        return Err(NnError::ShapeMismatch("im2col needs [n, c, h, w]".into()));
    };
    let (kh, kw) = kernel;
    if kh > ih || kw > iw || stride == 0 {
        return Err(NnError::ShapeMismatch(format!(
            "kernel {kh}x{kw} stride {stride} does not fit input {ih}x{iw}"
        )));
    }
    let (oh, ow) = (conv_out_dim(ih, kh, stride), conv_out_dim(iw, kw, stride));
    let mut patches = Tensor::zeros(&[cin * kh * kw, n * oh * ow]);
    let cols = n * oh * ow;
    let data = input.data();
    for s in 0..n {
        for oy in 0..oh {
            for ox in 0..ow {
                let col = (s * oh + oy) * ow + ox;
                for c in 0..cin {
                    for dy in 0..kh {
                        for dx in 0..kw {
                            let row = (c * kh + dy) * kw + dx;
                            let iy = oy * stride + dy;
                            let ix = ox * stride + dx;
                            let v = data[((s * cin + c) * ih + iy) * iw + ix];
                            patches.data_mut()[row * cols + col] = v;
                        }
                    }
                }
            }
        }
    }
    Ok(patches)
}

/// Scatters patch-matrix gradients back onto the input layout; the adjoint
/// of [`im2col`].
pub(crate) fn col2im(
    patches: &Tensor,
    input_dims: &[usize],
    kernel: (usize, usize),
    stride: usize,
) -> Result<Tensor, NnError> {
    let &[n, cin, ih, iw] = input_dims else {
        return Err(NnError::ShapeMismatch("col2im needs [n, c, h, w]".into()));
    };
    let (kh, kw) = kernel;
    let (oh, ow) = (conv_out_dim(ih, kh, stride), conv_out_dim(iw, kw, stride));
    let cols = n * oh * ow;
    if patches.dims() != [cin * kh * kw, cols] {
        return Err(NnError::ShapeMismatch("patch matrix does not match input dims".into()));
    }
    let mut out = Tensor::zeros(input_dims);
    for s in 0..n {
        for oy in 0..oh {
            for ox in 0..ow {
                let col = (s * oh + oy) * ow + ox;
                for c in 0..cin {
                    for dy in 0..kh {
                        for dx in 0..kw {
                            let row = (c * kh + dy) * kw + dx;
                            let iy = oy * stride + dy;
                            let ix = ox * stride + dx;
                            out.data_mut()[((s * cin + c) * ih + iy) * iw + ix] +=
                                patches.data()[row * cols + col];
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Convolution as patch-matrix GEMM: `kernels [cout, cin, kh, kw]` applied
/// to `input [n, cin, ih, iw]` with a valid window and the given stride.
pub fn conv2d_as_gemm(
    input: &Tensor,
    kernels: &Tensor,
    stride: usize,
    core: Option<&CoreConfig>,
    corruption: Option<&Corruption>,
) -> Result<Tensor, NnError> {
    let &[n, cin, ih, iw] = input.dims() else {
        return Err(NnError::ShapeMismatch("conv input needs [n, c, h, w]".into()));
    };
    let &[cout, kcin, kh, kw] = kernels.dims() else {
        return Err(NnError::ShapeMismatch("kernels need [cout, cin, kh, kw]".into()));
    };
    if kcin != cin {
        return Err(NnError::ShapeMismatch(format!(
            "kernel channels {kcin} vs input channels {cin}"
        )));
    }
    let patches = im2col(input, (kh, kw), stride)?;
    let kmat = kernels.reshape(&[cout, cin * kh * kw])?;
    let flat = tiled_gemm(&kmat, &patches, core, corruption)?;
    let (oh, ow) = (conv_out_dim(ih, kh, stride), conv_out_dim(iw, kw, stride));
    // flat is [cout, n*oh*ow] with sample-major columns; reorder to
    // [n, cout, oh, ow].
    let mut out = Tensor::zeros(&[n, cout, oh, ow]);
    for co in 0..cout {
        for s in 0..n {
            for oy in 0..oh {
                for ox in 0..ow {
                    let v = flat.at(co, (s * oh + oy) * ow + ox);
                    out.data_mut()[((s * cout + co) * oh + oy) * ow + ox] = v;
                }
            }
        }
    }
    Ok(out)
}
