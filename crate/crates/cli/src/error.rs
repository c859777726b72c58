use jtorus::model::ModelError;
use jtorus::poincare::PoincareError;
use jtorus::tongues::TongueError;
use jtorus::IntegratorError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit code for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<IntegratorError> for CliError {
    fn from(e: IntegratorError) -> Self {
        match e {
            IntegratorError::InvalidConfig(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<PoincareError> for CliError {
    fn from(e: PoincareError) -> Self {
        match e {
            PoincareError::Integrator(inner) => inner.into(),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<TongueError<f64>> for CliError {
    fn from(e: TongueError<f64>) -> Self {
        match e {
            TongueError::Integrator(inner) => inner.into(),
            TongueError::Poincare(inner) => inner.into(),
            TongueError::InvalidConfig(_) | TongueError::BadBasePoint => {
                CliError::Usage(e.to_string())
            }
            TongueError::BracketFailure { .. } | TongueError::ResidualNotAttained { .. } => {
                let kept = e.partial().map_or(0, |c| c.samples.len());
                CliError::Numeric(format!("{e} (partial curve of {kept} samples discarded)"))
            }
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            CliError::Io(e.into())
        } else {
            CliError::Usage(format!("malformed json: {e}"))
        }
    }
}
