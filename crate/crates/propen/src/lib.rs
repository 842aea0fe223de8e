//! Property-guided design enhancement toolkit.
//!
//! The core idea: build a matched dataset of (design, better-design) pairs
//! from nearness thresholds alone, train an encoder-decoder to reconstruct
//! each design's better partner, and iterate the trained map from a seed
//! design until it reaches a fixed point. No explicit property predictor is
//! involved; the improvement direction is implicit in the matched data.
//!
//! Modules:
//! - [`matching`]: design sets and matched-pair construction
//! - [`neural`]: dense networks with exact backprop, Adam, serialization
//! - [`enhance`]: matched-reconstruction training, iterative optimization,
//!   and the closed-form per-seed minimizer oracle
//! - [`baseline`]: the explicit-guidance comparator (autoencoder plus latent
//!   discriminator ascent)
//! - [`datasets`]: toy 2-d generators, isometric embeddings, Gaussian KDE,
//!   NACA airfoil geometry, analytic test properties
//! - [`eval`]: improvement/uniqueness/novelty metrics and CSV reports
//! - [`theory`]: executable checks for the supporting theorems
//! - [`experiment`]: the seeded repetition runner behind the CLI

pub mod baseline;
pub mod datasets;
pub mod enhance;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod matching;
pub mod neural;
pub mod scaling;
pub mod theory;

pub use error::{Error, Result};
