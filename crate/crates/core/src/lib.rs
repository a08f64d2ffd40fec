//! Derivative-free training of quantum-inspired perceptron networks, simulated
//! classically with dense complex linear algebra.

pub mod baseline_backprop;
pub mod complex_linalg;
pub mod dataset;
pub mod dynamics;
pub mod error;
pub mod markov_sim;
pub mod measurement;
pub mod metrics;
pub mod quantum_perceptron;
pub mod quantum_state;
pub mod real;
pub mod trainer;

pub use error::{Error, Result};
