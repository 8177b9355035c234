//! Configuration loading and experiment drivers behind the `storval` binary.

pub mod bundled;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use config::RunConfig;
pub use error::CliError;
