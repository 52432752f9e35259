use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("surface file: {0}")]
    Spec(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] umbilic_core::Error),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    /// 1 for bad input, 2 for numerical failures, 3 for internal errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(umbilic_core::Error::Internal(_)) => 3,
            CliError::Core(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}
