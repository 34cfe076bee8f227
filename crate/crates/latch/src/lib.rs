//! Learning discrete latent hierarchical causal models from continuous observations.
//!
//! The pipeline has three stages. A mixture stage fits a Gaussian mixture to the
//! continuous data and factorizes the component index into independent discrete
//! coordinates, recovering a global discrete state per sample. A rank stage
//! estimates nonnegative ranks of pairwise contingency tables, which act as
//! conditional-independence style probes between sets of variables. A search
//! stage uses those probes to cluster variables under shared latent parents and
//! assembles a hierarchical model, reported as a partially directed pattern.

pub mod catalog;
pub mod error;
pub mod mixture;
pub mod model;
pub mod operators;
pub mod pattern;
pub mod rank;
pub mod score;
pub mod search;
pub mod separation;
pub mod synth;
pub mod validate;

pub use error::{Error, Result};
