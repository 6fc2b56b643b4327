//! OFDM spectrum-sensing dataset synthesis with GAN-based training-data
//! augmentation and domain adaptation.
//!
//! The crate is organised bottom-up:
//!
//! - [`signalgen`] builds the OFDM transmit chain, Rayleigh block fading and
//!   AWGN, and produces labeled datasets (`SIQD` files).
//! - [`nncore`] is a small dense network engine with exact backprop, the
//!   binary cross-entropy GAN losses and Adam.
//! - [`gan`] trains the conditional GAN, the bidirectional GAN and the
//!   adaptation CGAN.
//! - [`classify`] holds the random forest and RBF-kernel SVM detectors.
//! - [`pipelines`] wires the above into the augmentation and adaptation
//!   workflows and parameter sweeps.
//! - [`config`] is the TOML experiment description consumed by the CLI.

pub mod classify;
pub mod config;
pub mod error;
pub mod gan;
pub mod io;
pub mod matrix;
pub mod nncore;
pub mod pipelines;
pub mod rng;
pub mod scaler;
pub mod signalgen;

pub use error::{Error, Result};
pub use matrix::Matrix;
