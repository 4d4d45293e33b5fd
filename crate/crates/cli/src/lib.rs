//! Library half of the `coalg` command-line tool.

pub mod commands;
pub mod document;
pub mod dot;

pub use commands::{run, CliError, Command, Options, Outcome};
