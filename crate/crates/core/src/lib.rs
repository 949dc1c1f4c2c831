//! Minimum interrogation time of qubit sensors.
//!
//! Combines the projection-noise distinguishability threshold
//! `F₀ = N/(N+1)` with the Mandelstam–Tamm and Margolus–Levitin speed limits
//! to bound how fast a signal can be resolved, and checks each bound against
//! direct simulation:
//!
//! - [`pauli`]: closed-form single-qubit algebra and propagators
//! - [`distinguishability`]: SNR criterion, critical fidelity, exact detection law
//! - [`qsl`]: static and envelope speed limits, exact crossing times
//! - [`manybody`]: brute-force tensor-product check of the M-body scaling
//! - [`control`]: eigenframe tracking and the controlled speed limit
//! - [`scenarios`]: AC and rotating magnetic-field examples, dataset emitters
//! - [`montecarlo`]: seeded projective-measurement experiments
//!
//! Units: ħ = 1 throughout except in [`scenarios`], which converts to tesla.

// `!(x > 0.0)` style guards reject NaN on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distinguishability;
pub mod control;
pub mod envelope;
pub mod error;
pub mod manybody;
pub mod montecarlo;
pub mod numeric;
pub mod pauli;
pub mod qsl;
pub mod scenarios;

pub use error::{Error, Result};
