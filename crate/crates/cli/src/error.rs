use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at {path}: {reason}")]
    Schema { path: String, reason: String },
    #[error("invalid config: {0}")]
    Validation(String),
    #[error("cannot read config {path}: {source}")]
    ReadConfig {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid THERMOFORM_CAP {0:?}: expected a positive integer")]
    Cap(String),
    #[error(transparent)]
    Compute(#[from] thermoform::Error),
    #[error("no rows to write")]
    EmptyRows,
    #[error("a sweep plot needs at least two grid points")]
    ShortSweep,
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("verification failed: {0} of {1} checks")]
    VerifyFailed(usize, usize),
}

impl CliError {
    /// 1 for configuration problems, 2 for everything that goes wrong
    /// while computing or writing results.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema { .. } | CliError::Validation(_) | CliError::ReadConfig { .. } | CliError::Cap(_) => 1,
            _ => 2,
        }
    }
}
