//! Certification of Pauli-sparse Hamiltonians from black-box time evolution.
//!
//! Everything runs as an exact small-system simulation: the unknown
//! Hamiltonian is sealed inside an [`evolution::EvolutionOracle`], certifiers
//! only see unitaries and a resource ledger, and all quantum circuits are
//! evaluated with dense linear algebra.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`). The aliases
//! below fix the scalar to `f64`, which is what the certifiers and the CLI use.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod amplitude;
pub mod certify;
pub mod coeff;
pub mod dense;
pub mod error;
pub mod evolution;
pub mod hamiltonian;
pub mod lowerbound;
pub mod pauli;
pub mod sampling;
pub mod scalar;
pub mod stabilizer;
pub mod stats;

pub use error::{Error, Result};
pub use scalar::Real;

pub type DenseOperator = dense::DenseOperator<f64>;
pub type StateVector = dense::StateVector<f64>;
pub type PauliVector = pauli::PauliVector<f64>;
pub type PauliHamiltonian = hamiltonian::PauliHamiltonian<f64>;
pub type EvolutionOracle = evolution::EvolutionOracle<f64>;
pub type TimeLedger = evolution::TimeLedger<f64>;
