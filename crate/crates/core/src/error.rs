use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("coin space of {size} outcomes exceeds enumeration limit {limit}")]
    CoinSpaceTooLarge { size: u128, limit: u128 },

    #[error("referee procedure `{0}` has no closed-form outcome distribution; use Monte-Carlo evaluation")]
    NoClosedForm(String),

    #[error("message of {len} bits exceeds declared budget of {budget} bits")]
    MessageTooLong { len: usize, budget: usize },

    #[error("acceptance probability {p} of pair (x={x}, y={y}) lies inside the forbidden band (1/3, 2/3)")]
    ForbiddenBand { x: usize, y: usize, p: f64 },

    #[error("instances do not separate: pair (x={x}, y={y}) {detail}")]
    NotSeparating { x: usize, y: usize, detail: String },

    #[error("distance floor {floor} unreachable after {attempts} samples (best {best})")]
    DistanceFloorUnreachable { floor: usize, attempts: usize, best: usize },

    #[error("simulation budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("code too weak: swap-test pass probability {0} for distinct codewords")]
    CodeTooWeak(f64),

    #[error("random projection lost the half margin: worst signed margin {worst} < {required}")]
    ProjectionFailed { worst: f64, required: f64 },

    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
