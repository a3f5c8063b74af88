//! Quantum Fisher information, symmetric logarithmic derivatives and the
//! curvature of entanglement for two-qubit probes under Heisenberg-type
//! interactions.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod hamiltonian;
pub mod linalg;
pub mod metrology;
pub mod states;
pub mod tol;

pub use error::{Error, Result};
