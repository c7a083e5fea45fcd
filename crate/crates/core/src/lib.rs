//! Simulation library for comparing conventional (single-copy) and
//! quantum-enhanced (two-copy / Bell-probe) learning experiments on
//! qubit states and dynamics, together with the closed-form
//! sample-complexity bounds the comparisons are measured against.
//!
//! The crate is organised around three task families, each with a
//! conventional and a quantum-enhanced strategy behind a common trait
//! (see [`strategy`]):
//!
//! - predicting/comparing Pauli observables of an unknown product-state
//!   ensemble ([`ensemble`], [`bell`], [`shadow`]),
//! - classifying random 1D circuit dynamics by time-reversal symmetry
//!   ([`statevec`], [`dynamics`], [`kpca`]),
//! - principal-component analysis of a noisy state ([`qpca`]).

pub mod bell;
pub mod bounds;
pub mod dataset;
pub mod dynamics;
pub mod ensemble;
mod error;
pub mod kpca;
pub mod noise;
pub mod pauli;
pub mod qpca;
pub mod rngstream;
pub mod shadow;
pub mod statevec;
pub mod strategy;

pub use error::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Complex amplitude type used by all simulators.
pub type C64 = num_complex::Complex64;
