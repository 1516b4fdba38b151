//! Exact Elliott invariants (ordered K₀ with trace pairing, K₁, trace range)
//! and topological entropy for crossed products by time-t maps of
//! suspension flows over Cantor minimal systems.
//!
//! Base systems are given combinatorially (primitive substitutions,
//! odometers, the one-point system) and presented as stationary
//! Bratteli–Vershik diagrams. Everything except the numerical entropy
//! estimator is exact.

pub mod algebra;
pub mod comparison;
pub mod dimension;
pub mod entropy;
pub mod error;
pub mod invariant;
pub mod systems;

pub use error::{Error, Result};
