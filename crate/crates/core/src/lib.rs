//! Multiuser SWIPT beamforming with null-space interference suppression.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. Everything here is a pure function of its inputs and a seed; file
//! formats, the Monte Carlo harness and the command line live in the `swipt`
//! companion crate.
//!
//! Module map:
//!
//! * [`system_model`]: scenario parameters, Rician/ULA channel draws, path loss
//!   and the imperfect-CSI corruption model.
//! * [`energy_harvest`]: the logistic RF-to-DC model and waveform-aware
//!   received/harvested power evaluation.
//! * [`nullspace`]: SVD null spaces, equivalent channels and the interlacing
//!   check between information and energy null spaces.
//! * [`sdp`]: a small dense primal-dual interior-point solver for Hermitian
//!   block SDPs with trace inequality constraints.
//! * [`beamform`]: the four beamforming strategies and the per-user evaluator.
//! * [`complexity`]: closed-form operation counts of each strategy.
#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
mod math;

pub mod beamform;
pub mod complexity;
pub mod energy_harvest;
pub mod linalg;
pub mod nullspace;
pub mod sdp;
pub mod system_model;

pub use error::{Error, Result};
pub use num_complex::Complex64;
