//! Qubit-efficient quantum local search on a simulated statevector.
//!
//! A quantum circuit with few qubits proposes flips of spin groups around a
//! current solution. Measurement statistics are mapped to continuous
//! auxiliary variables, a classical optimizer tunes the circuit, and the
//! most probable flip combinations are decoded back into spin vectors.

pub mod auxiliary;
pub mod baselines;
pub mod error;
pub mod harness;
pub mod model;
pub mod neighborhood;
pub mod optimizer;
pub mod recovery;
pub mod rng;
pub mod simulator;

pub use error::{Error, Result};
