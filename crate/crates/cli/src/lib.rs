//! Scenario runner for the sublinear-expectation engine: a structured text
//! format for finite spaces with named measures, sigma-algebras, variables
//! and checks; deterministic reports; a brute-force oracle harness; and a
//! generator for uncertain-volatility tree scenarios.

pub mod checks;
pub mod gen;
pub mod oracle;
pub mod report;
pub mod scenario;
pub mod uvol;

use thiserror::Error;

/// Input and environment failures; anything here exits with code 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError::Input(message.into())
    }

    pub fn from_engine(error: qsure::Error) -> Self {
        CliError::Input(error.to_string())
    }
}

impl From<String> for CliError {
    fn from(message: String) -> Self {
        CliError::Input(message)
    }
}
