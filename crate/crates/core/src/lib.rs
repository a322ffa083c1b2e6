//! Einselection toolkit over dense complex linear algebra.
//!
//! The crate models a small universe of two-level entities evolving
//! unitarily under a Pauli-string Hamiltonian, and everything an observer
//! can build on top of it:
//!
//! - [`qcore`] — states, operators, tensor products, partial traces,
//!   eigendecomposition, entropies;
//! - [`hamiltonian`] — Pauli-string term lists and exact bipartite
//!   decompositions into self and interaction parts;
//! - [`einselect`] — Hamiltonian-dominance conditions, pointer-basis
//!   extraction, coupling matrices, halo scans, exclusion and fragment
//!   separability checks;
//! - [`povm`] — generalized measurements, the detection-threshold
//!   dominance rule, recognized supports, informational completeness;
//! - [`observer`] — scheduled observation of a unitary trajectory emitting
//!   classical record traces;
//! - [`vmx`] — stochastic finite-state-machine extraction from record
//!   traces and comparison against analytic predictions.
//!
//! Core math is generic over the real scalar via [`scalar::Float`];
//! concrete `f64`/`f32` aliases for the main types live at the crate root.

pub mod einselect;
pub mod entity;
pub mod error;
pub mod hamiltonian;
mod math;
pub mod observer;
pub mod povm;
pub mod qcore;
pub mod scalar;
pub mod vmx;

pub use entity::EntitySet;
pub use error::{Error, ErrorCategory, Result};
pub use scalar::Float;

/// `f64` aliases for the main domain types.
pub type StateVector64 = qcore::StateVector<f64>;
pub type Operator64 = qcore::Operator<f64>;
pub type DensityOperator64 = qcore::DensityOperator<f64>;
pub type HamiltonianTerms64 = hamiltonian::HamiltonianTerms<f64>;
pub type Povm64 = povm::Povm<f64>;
pub type RecordTrace64 = observer::RecordTrace<f64>;
pub type StochasticFsm64 = vmx::StochasticFsm<f64>;

/// `f32` aliases for the main domain types.
pub type StateVector32 = qcore::StateVector<f32>;
pub type Operator32 = qcore::Operator<f32>;
pub type DensityOperator32 = qcore::DensityOperator<f32>;
pub type HamiltonianTerms32 = hamiltonian::HamiltonianTerms<f32>;
pub type Povm32 = povm::Povm<f32>;
pub type RecordTrace32 = observer::RecordTrace<f32>;
pub type StochasticFsm32 = vmx::StochasticFsm<f32>;
