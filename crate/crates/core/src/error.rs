use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("empty input: no edges found")]
    EmptyInput,
    #[error("truncated CSR stream while reading {0}")]
    Truncated(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unknown pattern `{0}`")]
    UnknownPattern(String),
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),
    #[error("plan compilation failed: {0}")]
    PlanValidation(String),
    #[error("graph has {0} vertices; the brute-force oracle is limited to 64")]
    OracleTooLarge(usize),
    #[error("{what} {value} out of range (limit {limit})")]
    OutOfRange {
        what: &'static str,
        value: u64,
        limit: u64,
    },
    #[error("invalid topology: {0}")]
    InvalidTopology(String),
    #[error("duplication budget exceeded on unit {unit}: needs {needed} bytes, {available} free")]
    BudgetExceeded {
        unit: usize,
        needed: u64,
        available: u64,
    },
    #[error("placement does not match topology: {0}")]
    PlacementMismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
