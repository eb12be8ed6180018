use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Two descriptions of the same variable disagree, or a variable receives
    /// two conditionals.
    #[error("model inconsistency: {0}")]
    ModelInconsistency(String),

    /// A caller broke an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Bad user-supplied data (unknown state label, unknown variable, ...).
    #[error("invalid input: {0}")]
    Input(String),

    /// The evidence has probability zero under the model.
    #[error("zero-probability evidence: {0}")]
    ZeroProbabilityEvidence(String),

    #[error("state space too large: {cells} cells exceeds the cap of {cap}")]
    TooLarge { cells: u128, cap: u128 },

    #[error("invalid separator: {0}")]
    InvalidSeparator(String),

    #[error("directed cycle through variable {0}")]
    Cycle(String),

    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    /// An internal invariant failed. Always a bug.
    #[error("internal invariant failure: {0}")]
    Internal(String),
}
