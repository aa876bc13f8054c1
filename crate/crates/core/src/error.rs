use thiserror::Error;

/// Errors raised by the library.
///
/// Variants fall into four families that the CLI maps onto exit codes:
/// precondition failures, size gates / timeouts, internal verification
/// failures (bug signals) and I/O or parse problems.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("points do not affinely span the ambient space (rank {rank}, expected {expected})")]
    NotAffinelySpanning { rank: usize, expected: usize },

    #[error("vectors do not linearly span the ambient space (rank {rank}, expected {expected})")]
    NotSpanning { rank: usize, expected: usize },

    #[error("dual points do not sum to zero")]
    NonzeroSum,

    #[error("vector is not a non-zero affine dependence of the primal points")]
    NotADependence,

    #[error("functional must be non-zero")]
    ZeroFunctional,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("field mismatch: {0}")]
    FieldMismatch(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    #[error("size gate exceeded: {what} (limit {limit})")]
    SizeGate { what: String, limit: u64 },

    #[error("timed out after {seconds} s")]
    Timeout { seconds: u64 },

    #[error("theorem guarantee violated: {0}")]
    GuaranteeViolation(String),

    #[error("internal verification failed: {0}")]
    Verification(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn verify(msg: impl Into<String>) -> Self {
        Error::Verification(msg.into())
    }

    pub(crate) fn gate(what: impl Into<String>, limit: u64) -> Self {
        Error::SizeGate {
            what: what.into(),
            limit,
        }
    }

    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SizeGate { .. } | Error::Timeout { .. } => 3,
            Error::GuaranteeViolation(_) | Error::Verification(_) => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
