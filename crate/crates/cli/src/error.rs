use std::fmt;

use crate::config::ConfigIssue;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const IO: u8 = 1;
    /// Command-line usage errors (reported by the argument parser).
    pub const USAGE: u8 = 2;
    pub const CONFIG: u8 = 3;
    pub const REGIME: u8 = 4;
    pub const NUMERICAL: u8 = 5;
    pub const INGESTION: u8 = 6;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}", render_issues(.0))]
    Config(Vec<ConfigIssue>),
    #[error(transparent)]
    Core(#[from] biphoton::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn render_issues(issues: &[ConfigIssue]) -> String {
    let mut s = format!("invalid configuration ({} problem{}):", issues.len(), if issues.len() == 1 { "" } else { "s" });
    for i in issues {
        s.push_str(&format!("\n  {i}"));
    }
    s
}

impl CliError {
    pub fn io(path: impl fmt::Display, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_string(), source }
    }

    pub fn exit_code(&self) -> u8 {
        use biphoton::Error as E;
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Io { .. } => exit::IO,
            CliError::Core(e) => match e {
                E::InvalidInput(_) => exit::CONFIG,
                E::Regime(_) | E::Domain { .. } => exit::REGIME,
                E::Sizing { .. } | E::Width(_) | E::Numerical(_) | E::NotConverged { .. } => exit::NUMERICAL,
                E::Ingestion(_) => exit::INGESTION,
            },
        }
    }
}

impl From<Vec<ConfigIssue>> for CliError {
    fn from(issues: Vec<ConfigIssue>) -> Self {
        CliError::Config(issues)
    }
}

pub type CliResult<T> = Result<T, CliError>;
