use thiserror::Error;

/// Failure of a subcommand, carrying its process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<qperc::Error> for CliError {
    fn from(e: qperc::Error) -> Self {
        use qperc::Error as E;
        match e {
            E::Config(_) | E::Dimension { .. } | E::Range { .. } | E::EmptyInput(_) => CliError::Usage(e.to_string()),
            E::NoConvergence { .. } | E::Degenerate(_) | E::Contract(_) => CliError::Numeric(e.to_string()),
        }
    }
}

pub(crate) fn io_error(path: &std::path::Path, e: std::io::Error) -> CliError {
    CliError::Usage(format!("{}: {e}", path.display()))
}
