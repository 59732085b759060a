//! Experiment driver for the anisotropic Stefan solver: TOML configs,
//! source expressions, CSV artifacts and the `solve`, `sweep`, `check` and
//! `embeddings` commands.

// `!(x >= 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod expr;
pub mod io;

pub use commands::{Overrides, SweepParam};
pub use config::ExperimentConfig;
pub use error::{CliError, CliResult};
