//! Simulation library for residue-number-system (RNS) based analog
//! matrix accelerators.
//!
//! The crate provides five building blocks:
//!
//! - [`rns`] -- exact RNS arithmetic: validated co-prime moduli sets,
//!   forward conversion, signed CRT reconstruction, element-wise and
//!   dot-product modular operations, and the output-range constraint check.
//! - [`rrns`] -- redundant RNS(n+k, n) codes: encoding, fault injection,
//!   majority-logic decoding, the analytical error-probability model,
//!   and a Monte Carlo oracle.
//! - [`analog`] -- bit-accurate models of three analog tile cores
//!   (low-precision fixed point, high-precision fixed point, RNS) plus
//!   dynamic scaling, output corruption, and behavioral analog-modulo
//!   models (ring oscillator, optical phase shifter).
//! - [`energy`] -- data-converter energy accounting per dot product.
//! - [`hybrid`] -- arbitrary-precision arithmetic combining RNS with a
//!   positional digit system (primary/secondary residues, base extension,
//!   overflow detection, carry propagation).
//! - [`nn`] -- a desk-scale neural-network harness that runs tiled GEMMs
//!   on the simulated cores for inference and training.
//!
//! ```
//! use rnsim_core::rns::{ModuliSet, Preset};
//!
//! let ms = ModuliSet::from_preset(Preset::Rns4);
//! let rv = ms.forward_convert_i64(-5).unwrap();
//! assert_eq!(rv.residues(), &[10, 9, 8, 6]);
//! assert_eq!(ms.crt_reconstruct_i64(&rv).unwrap(), -5);
//! ```

pub mod analog;
pub mod energy;
pub mod hybrid;
pub mod nn;
pub mod rns;
pub mod rrns;
pub mod seed;
