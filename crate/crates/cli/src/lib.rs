//! Command-line front end: argument parsing, config-file merging, output
//! formatting and the subcommands.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;

/// Failure classes, each with its own exit status.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Verification(String),
    Numeric(fdside::Error),
    Io(std::io::Error),
}

impl From<fdside::Error> for Failure {
    fn from(e: fdside::Error) -> Self {
        Failure::Numeric(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

