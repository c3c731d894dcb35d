//! Configuration-driven driver for walk simulations and walk/network
//! compilation. The `qwalk` binary is a thin wrapper over [`run::run`] and
//! [`compile::compile`].

pub mod compile;
pub mod config;
pub mod run;

pub use compile::{compile, CompileDirection, CompileReport, VERIFY_TOL};
pub use config::{parse_run_config, RunConfig, WalkDocument};
pub use run::{run, RunOptions, RunReport};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Schema or value error in an input document, located by field path.
    #[error("config error at {field}: {message}")]
    Config { field: String, message: String },
    #[error(transparent)]
    Core(#[from] qwalk_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    /// A compiled artifact failed its own verification; a bug, not a user
    /// error.
    #[error("internal error: compiled {what} differs from its input by {distance:e} (tolerance {tolerance:e})")]
    Verification {
        what: &'static str,
        distance: f64,
        tolerance: f64,
    },
}

impl CliError {
    pub(crate) fn invalid(field: &str, err: qwalk_core::Error) -> CliError {
        CliError::Config {
            field: field.to_string(),
            message: err.to_string(),
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> CliError {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Core(_) => 3,
            CliError::Io { .. } => 4,
            CliError::Verification { .. } => 70,
        }
    }
}

pub(crate) fn read_file(path: &std::path::Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub(crate) fn write_file(path: &std::path::Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Shortest text that parses back to the same `f64`.
pub(crate) fn fmt_f64(x: f64) -> String {
    match serde_json::Number::from_f64(x) {
        Some(n) => n.to_string(),
        None => format!("{x}"),
    }
}
