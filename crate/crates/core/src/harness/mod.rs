//! Configuration, experiment pipelines, the verification suite and output formats.

pub mod config;
pub mod output;
pub mod run;
pub mod verify;

pub use config::{ExperimentConfig, InitialCondition};
pub use output::ResultRow;
