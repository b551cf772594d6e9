use thiserror::Error;

/// Failure to read one of the text formats.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: bad header: {reason}")]
    BadHeader { line: usize, reason: String },
    #[error("line {line}, column {column}: unexpected character {found:?}")]
    BadCharacter { line: usize, column: usize, found: char },
    #[error("line {line}: expected {expected} entries, found {found}")]
    WrongWidth { line: usize, expected: usize, found: usize },
    #[error("unexpected end of input: expected {expected} more line(s)")]
    Truncated { expected: usize },
    #[error("line {line}: trailing content after the matrix")]
    TrailingContent { line: usize },
    #[error("line {line}: {reason}")]
    Invalid { line: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("query-set operation {step}: {reason}")]
    BadQsStep { step: usize, reason: String },
    #[error("search budget of {budget} exceeded")]
    BudgetExceeded { budget: u64 },
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix carries no bitstring labels")]
    MissingLabels,
    #[error("no valid partition found within {tries} tries")]
    NoPartition { tries: usize },
    #[error("no homogeneous set of size {size} over ground set of size {ground}")]
    NoHomogeneousSet { size: usize, ground: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("malformed protocol tree: {0}")]
    MalformedTree(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl Error {
    /// Budget exhaustion is reported separately from "no solution exists".
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
