//! Library side of the `mlcount` binary.

pub mod bench;
pub mod commands;
pub mod error;
pub mod fixtures;
pub mod selftest;

pub use commands::{run, Cli};
pub use error::CliError;
