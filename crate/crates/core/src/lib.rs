//! Pauli path simulation and variational training for Ising and Kitaev
//! honeycomb models.
//!
//! Observables are propagated in the Heisenberg picture as sparse sums of
//! Pauli strings, dropping any term whose coefficient magnitude falls to or
//! below a threshold `delta_c`. Parametrized circuits are trained with
//! SPSA gradients fed to ADAM.

pub mod circuit;
pub mod config;
pub mod engine;
pub mod error;
pub mod measure;
pub mod models;
pub mod operator;
pub mod optimizer;
pub mod oracle;
pub mod pauli;
pub mod qasm;
pub mod run;
pub mod topo;

pub use circuit::{Circuit, Clifford, Gate, InitialState, ParamRef};
pub use engine::{expectation, heisenberg_evolve, Engine, EngineStats};
pub use error::{Error, Result};
pub use operator::SparseOperator;
pub use pauli::{Pauli, PauliString};
