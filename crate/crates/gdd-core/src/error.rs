use crate::verify::VerificationReport;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A text format (design file, data file, signature, provenance
    /// expression, coded string) could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// Structural invariant violated while building a value (bad partition,
    /// block shape, inconsistent parameters, ...).
    #[error("invalid value: {0}")]
    Invalid(String),

    /// An operation's mathematical precondition does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A named catalogue entry does not exist.
    #[error("unknown appendix entry: {0}")]
    UnknownEntry(String),

    /// A construction was handed an ingredient whose type or structure does
    /// not match what the construction requires.
    #[error("ingredient mismatch: {0}")]
    Ingredient(String),

    /// A design failed exhaustive verification where a verified design was
    /// required (e.g. on insertion into the registry).
    #[error("verification failed: {}", .0.summary())]
    FailedVerification(Box<VerificationReport>),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
