//! Error types shared by the whole crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    Dimension {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid data: {0}")]
    Data(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("not enough samples: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("normal equations are ill-conditioned (rcond = {rcond:.3e})")]
    IllConditioned { rcond: f64 },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("singular matrix: {0}")]
    SingularMatrix(String),

    #[error("baseline MSE is not positive; reduction percentage undefined")]
    UndefinedBaseline,

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable class name, used e.g. in sweep report status cells.
    pub fn class(&self) -> &'static str {
        match self {
            Error::Dimension { .. } => "dimension",
            Error::Data(_) => "data",
            Error::Parameter(_) => "parameter",
            Error::InsufficientData { .. } => "insufficient_data",
            Error::IllConditioned { .. } => "ill_conditioned",
            Error::DegenerateGeometry(_) => "degenerate_geometry",
            Error::SingularMatrix(_) => "singular_matrix",
            Error::UndefinedBaseline => "undefined_baseline",
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
