//! Effective logical noise channels for stabilizer-encoded qubits.
//!
//! A Pauli channel acting independently on the `m` physical qubits of a
//! stabilizer code is reduced, syndrome by syndrome, to a Pauli channel on the
//! encoded qubit. The crate provides:
//!
//! - [`pauli`]: symplectic Pauli strings and single-qubit Pauli channels,
//! - [`codes`]: repetition, GHZ and cluster-ring codes plus user-defined codes,
//! - [`effective`]: the exhaustive enumeration engine, closed forms and a dense
//!   Choi-matrix oracle,
//! - [`entanglement`]: dense density matrices, negativity, and PPT-based
//!   lifetime bounds for logical GHZ states,
//! - [`concat`]: level-by-level composition and critical-rate searches.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, which is what the CLI uses.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod codes;
pub mod concat;
pub mod effective;
pub mod entanglement;
mod error;
pub mod linalg;
pub mod pauli;
mod scalar;

pub use codes::{CodeDefinition, RecoveryAlphabet, StabilizerCode, Syndrome, ValidationReport};
pub use concat::{ChannelMode, ConcatLevel, ConcatSpec};
pub use effective::{EnumerationOptions, DEFAULT_ENUMERATION_CAP};
pub use error::{Error, Result};
pub use pauli::{Pauli, PauliString, Phase};
pub use scalar::Real;

/// Double-precision Pauli channel.
pub type Channel = pauli::PauliChannel<f64>;
/// Single-precision Pauli channel.
pub type Channel32 = pauli::PauliChannel<f32>;
pub type Effective = effective::EffectiveChannel<f64>;
pub type Effective32 = effective::EffectiveChannel<f32>;
pub type Choi = effective::ChoiCoefficients<f64>;
pub type Density = entanglement::DensityMatrix<f64>;
pub type Density32 = entanglement::DensityMatrix<f32>;
pub type Lifetime = entanglement::LifetimeResult<f64>;
pub type CriticalRate = concat::CriticalRateResult<f64>;
