use thiserror::Error;

/// Coarse failure class, mapped one-to-one onto CLI exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed input or violated invariant (exit 2).
    Input,
    /// Degenerate parameters or numerical breakdown (exit 3).
    Numerical,
    /// Filesystem or stream failure (exit 4).
    Io,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Input => 2,
            ErrorClass::Numerical => 3,
            ErrorClass::Io => 4,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("malformed scenario at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown key(s): {}", .0.join(", "))]
    UnknownKeys(Vec<String>),

    #[error("unknown sweep field `{0}`")]
    UnknownField(String),

    #[error("degenerate SIS parameters: r*k - alpha = {beta:e} is numerically zero")]
    BetaZero { beta: f64 },

    #[error("degenerate SIR parameters: lambda = {lambda:e} is numerically zero")]
    LambdaZero { lambda: f64 },

    #[error("non-finite value produced at t = {t}")]
    NonFinite { t: f64 },

    #[error(
        "step size insufficient: dt vs dt/2 discrepancy {discrepancy:e} at t = {t} exceeds tolerance {tolerance:e}"
    )]
    StepSizeInsufficient {
        t: f64,
        discrepancy: f64,
        tolerance: f64,
    },

    #[error("trajectories are not comparable: {0}")]
    GridMismatch(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("at grid index {index} (t = {t}): {source}")]
    AtGridPoint {
        index: usize,
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Machine-readable category name, printed first on every CLI failure.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Validation { .. } | Error::UnknownKeys(_) => "ValidationError",
            Error::Parse { .. } => "ParseError",
            Error::UnknownField(_) => "UnknownField",
            Error::BetaZero { .. } => "BetaZero",
            Error::LambdaZero { .. } => "LambdaZero",
            Error::NonFinite { .. } => "NonFinite",
            Error::StepSizeInsufficient { .. } => "StepSizeInsufficient",
            Error::GridMismatch(_) => "GridMismatch",
            Error::Precondition(_) => "PreconditionViolation",
            Error::AtGridPoint { source, .. } => source.category(),
            Error::Io(_) => "IoError",
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Validation { .. }
            | Error::Parse { .. }
            | Error::UnknownKeys(_)
            | Error::UnknownField(_)
            | Error::GridMismatch(_)
            | Error::Precondition(_) => ErrorClass::Input,
            Error::BetaZero { .. }
            | Error::LambdaZero { .. }
            | Error::NonFinite { .. }
            | Error::StepSizeInsufficient { .. } => ErrorClass::Numerical,
            Error::AtGridPoint { source, .. } => source.class(),
            Error::Io(_) => ErrorClass::Io,
        }
    }

    /// Strips any grid-index wrapper.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtGridPoint { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
