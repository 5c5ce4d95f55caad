//! Error type shared by every module, with the CLI exit-code mapping.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("part `{0}` has no design alternatives")]
    EmptyPart(String),
    #[error("unknown {kind} `{id}`")]
    Unknown { kind: &'static str, id: String },
    #[error("`{0}` and `{1}` belong to the same part")]
    SamePart(String, String),
    #[error("missing compatibility entry for ({0}, {1})")]
    MissingCompatibility(String, String),
    #[error("criterion weights of part `{part}` sum to {sum}, expected 1")]
    WeightSum { part: String, sum: String },
    #[error("design alternative `{0}` has no priority")]
    MissingPriority(String),
    #[error("design alternative `{da}` lacks an estimate for `{criterion}`")]
    MissingEstimate { da: String, criterion: String },
    #[error("{0} is out of range")]
    OutOfRange(String),
    #[error("malformed instance: {0}")]
    Malformed(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("{what} exceeds the cap of {cap}")]
    CapExceeded { what: &'static str, cap: u64 },
    #[error("empty support after alpha cut")]
    EmptySupport,
    #[error("LP parse error on line {line}: {msg}")]
    LpParse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code: 2 for bad input, 3 when the solver cannot produce an answer.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Infeasible(_) | Error::CapExceeded { .. } | Error::EmptySupport => 3,
            _ => 2,
        }
    }
}
