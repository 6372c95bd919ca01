//! Command implementations behind the `qbird` binary.

pub mod commands;
pub mod compare;
pub mod config;
pub mod error;
pub mod manifest;

pub use commands::{inject, run, SamplerKind};
pub use compare::{compare, CompareReport, SampleSet};
pub use config::{CliConfig, Overrides};
pub use error::{CliError, CliResult};
pub use manifest::RunManifest;
