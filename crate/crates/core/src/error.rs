use thiserror::Error;

/// Errors produced by the library and the experiment runner.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid dimension {dim}: expected a power of two")]
    InvalidDimension { dim: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("basis angle {theta} not supported by the closed form; use the oracle")]
    UnsupportedBasis { theta: f64 },

    #[error("oracle capacity exceeded: {spins} spins (max {max})")]
    Capacity { spins: usize, max: usize },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("undefined normalization: initial central element is zero")]
    UndefinedNormalization,

    #[error("sampling failed: {0}")]
    Sampling(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl LabError {
    /// Short machine-readable kind tag, used by the CLI error line.
    pub fn kind(&self) -> &'static str {
        match self {
            LabError::InvalidDimension { .. } => "invalid_dimension",
            LabError::DimensionMismatch { .. } => "dimension_mismatch",
            LabError::NotHermitian { .. } => "not_hermitian",
            LabError::InvalidSize(_) => "invalid_size",
            LabError::UnsupportedBasis { .. } => "unsupported_basis",
            LabError::Capacity { .. } => "capacity",
            LabError::Validation(_) => "validation",
            LabError::Domain(_) => "domain",
            LabError::UndefinedNormalization => "undefined_normalization",
            LabError::Sampling(_) => "sampling",
            LabError::Config(_) => "config",
            LabError::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
