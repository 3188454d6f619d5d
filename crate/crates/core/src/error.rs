use thiserror::Error;

/// Errors raised anywhere in the laboratory.
///
/// The variants fall into four families that the command line maps onto
/// exit codes: configuration problems, numerical failures, lemma
/// falsifications and plain I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("weight {value:e} at site {site} is below the positivity floor {floor:e}")]
    NearDegenerateWeight { site: i64, value: f64, floor: f64 },

    #[error("weight function is invalid: {0}")]
    InvalidWeight(String),

    #[error("restricted operator is numerically singular (condition estimate {condition:e})")]
    Singular { condition: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("degenerate fit region: {0}")]
    DegenerateFit(String),

    #[error("hypothesis not satisfied: {0}")]
    HypothesisNotSatisfied(String),

    #[error("covering condition violated at site {site}")]
    CoveringViolation { site: i64 },

    #[error("scale ladder violation: {0}")]
    LadderViolation(String),

    #[error("regime window violation: {0}")]
    RegimeWindow(String),

    #[error("computation budget exhausted at scale {scale} after {used} Green's evaluations")]
    BudgetExhausted { scale: usize, used: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("PROPERTY FALSIFIED: {0}")]
    Falsified(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Process exit code for the command line: 2 config, 3 numerical,
    /// 4 falsification, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::InvalidArgument(_) | Error::LadderViolation(_) => 2,
            Error::RegimeWindow(_) | Error::InvalidWeight(_) => 2,
            Error::NearDegenerateWeight { .. }
            | Error::Singular { .. }
            | Error::Numerical(_)
            | Error::DegenerateFit(_)
            | Error::NotNormalized { .. }
            | Error::DimensionMismatch { .. }
            | Error::HypothesisNotSatisfied(_)
            | Error::CoveringViolation { .. }
            | Error::BudgetExhausted { .. } => 3,
            Error::Falsified(_) => 4,
            Error::Io(_) | Error::Json(_) | Error::Csv(_) => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
