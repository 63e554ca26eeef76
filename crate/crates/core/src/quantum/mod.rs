//! Quantum and classical primitives: states, stochastic matrices, channels.

mod channel;
mod ops;
mod types;

pub use channel::{extended_output_from_choi, QuantumChannel};
pub use ops::*;
pub use types::{DensityMatrix, ProbabilityVector, StochasticMatrix, UnitaryMatrix};
