//! Experiment harness for `flmm-core`: a registry of test problems,
//! convergence tables, stability data export, config files and the `flmm`
//! command line.

pub mod cli;
pub mod config;
pub mod convergence;
pub mod error;
pub mod experiment;
pub mod output;
pub mod problems;

pub use error::{HarnessError, Result};
