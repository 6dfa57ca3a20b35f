use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Arguments outside the operation's domain (wrong sizes, divisibility, overlap).
    #[error("domain error: {0}")]
    Domain(String),

    /// A stated hypothesis of the algorithm does not hold on the input.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Something the underlying argument rules out happened anyway.
    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    /// The request is well formed but too expensive for the chosen mode.
    #[error("refused: {0}")]
    Refused(String),

    #[error("digraph order {0} exceeds the supported maximum of 64")]
    TooLarge(usize),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("no swap applies to the C3 element at index {index}")]
    SwapNotFound { index: usize },

    #[error("stage `{stage}` failed: {diagnostics}")]
    StageFailed { stage: &'static str, diagnostics: String },

    #[error("no sampled candidate set was absorbing ({diagnostics})")]
    FamilyEmpty { diagnostics: String },

    #[error("could not assign every r-set of W to its own absorber ({assigned} of {needed})")]
    AssignmentFailed { assigned: usize, needed: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
