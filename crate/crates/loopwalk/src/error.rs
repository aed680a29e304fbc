use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |A - A^†| entry = {deviation:.3e})")]
    NonHermitianInput { deviation: f64 },

    #[error("state is not normalized (trace = {trace})")]
    NotNormalized { trace: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue = {min_eigenvalue:.3e})")]
    PsdViolation { min_eigenvalue: f64 },

    #[error("bad dimension {dim}: {reason}")]
    BadDimension { dim: usize, reason: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("probability {value} outside [0, 1]")]
    BadProbability { value: f64 },

    #[error("state trace {trace:.3e} is below the floor {floor:.1e}; nothing left to normalize")]
    VanishedState { trace: f64, floor: f64 },

    #[error("unknown figure preset {0:?}")]
    UnknownPreset(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{label}: {source}")]
    Labeled {
        label: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io { context: context.into(), source }
    }

    pub fn labeled(label: impl Into<String>, source: Error) -> Self {
        Error::Labeled { label: label.into(), source: Box::new(source) }
    }

    /// Process exit code the CLI maps this error to: 1 for usage/validation
    /// problems, 2 for runtime failures (I/O, numerical contract violations).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BadDimension { .. }
            | Error::DimensionMismatch { .. }
            | Error::BadProbability { .. }
            | Error::UnknownPreset(_)
            | Error::Config(_) => 1,
            Error::NonHermitianInput { .. }
            | Error::NotNormalized { .. }
            | Error::PsdViolation { .. }
            | Error::VanishedState { .. }
            | Error::Io { .. } => 2,
            Error::Labeled { source, .. } => source.exit_code(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
