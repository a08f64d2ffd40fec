//! Command-line harness for the qperc experiments: XOR comparison, depth
//! scaling, Markov chain simulation and generic training.

pub mod commands;
pub mod config;
pub mod data_file;
pub mod error;
pub mod records;

pub use config::ExperimentConfig;
pub use error::CliError;
