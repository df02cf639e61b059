//! Command-line front end: configuration, subcommands and their artifacts.

pub mod commands;
pub mod config;
pub mod error;
pub mod table;

pub use config::RunConfig;
pub use error::{CliError, CliResult};
