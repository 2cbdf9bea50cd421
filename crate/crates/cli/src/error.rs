use std::path::PathBuf;

use thiserror::Error;

/// Failures of a CLI run, each mapped to a fixed exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config parse error: {0}")]
    Parse(String),

    #[error("{0}")]
    Validation(String),

    #[error(transparent)]
    Core(#[from] mobius_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{failures} of {checked} oracle comparisons differ by ≥ 1e-8 (worst {worst:e})")]
    CrossCheck {
        failures: usize,
        checked: usize,
        worst: f64,
    },
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "parse",
            CliError::Validation(_) | CliError::Io { .. } => "validation",
            CliError::Core(e) if is_solver(e) => "solver",
            CliError::Core(_) => "validation",
            CliError::CrossCheck { .. } => "cross-check",
        }
    }

    /// 1 validation, 2 solver, 3 cross-check.
    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            "solver" => 2,
            "cross-check" => 3,
            _ => 1,
        }
    }

    /// One-line `key=value` description for stderr.
    pub fn machine_line(&self) -> String {
        format!(
            "error kind={} code={} message={:?}",
            self.kind(),
            self.exit_code(),
            self.to_string()
        )
    }
}

fn is_solver(e: &mobius_core::Error) -> bool {
    matches!(
        e,
        mobius_core::Error::Pole { .. } | mobius_core::Error::NotPropagating { .. }
    )
}
