//! Estimation, detection, and permutation recovery for unlabeled one-bit
//! quantized observations of a scalar amplitude.
//!
//! The observation chain is: amplitude `theta` scaled by per-quantizer gains
//! `h_i`, corrupted by additive noise, thresholded at `tau_i` into bits,
//! passed through a binary flipping channel, and finally row-scrambled by an
//! unknown permutation. Everything downstream works from the per-quantizer
//! fractions of ones, which are sufficient for `theta`.
//!
//! Modules follow the processing chain:
//!
//! - [`model`]: parameter types, noise families, permutation algebra
//! - [`likelihood`]: success probabilities, log-likelihoods, Fisher information
//! - [`sampling`]: seeded Monte Carlo generation of observation fractions
//! - [`estimation`]: joint amplitude/permutation maximum likelihood
//! - [`detection`]: generalized likelihood-ratio tests with calibrated thresholds
//! - [`recovery`]: analytic and empirical permutation-recovery probabilities

pub mod detection;
pub mod error;
pub mod estimation;
pub mod likelihood;
pub mod model;
pub mod recovery;
pub mod sampling;
pub mod solver;

pub use error::{Error, Result};
pub use model::{EtaVector, ModelConfig, NoiseDistribution, Permutation};
