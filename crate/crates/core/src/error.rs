use thiserror::Error;

/// Errors raised anywhere in the laboratory.
///
/// The variants follow the failure classes the CLI maps onto exit codes:
/// configuration problems exit with 2, verification failures with 1.
#[derive(Debug, Error)]
pub enum LabError {
    /// A size or cap was exceeded, or a requested window does not fit.
    #[error("sizing error: {0}")]
    Sizing(String),

    /// An index, edge, or lattice does not belong where it was used.
    #[error("structural error: {0}")]
    Structural(String),

    /// The lattice kind does not support the operation (e.g. dual of a segment).
    #[error("unsupported lattice kind: {0}")]
    UnsupportedKind(String),

    /// An input violated an operation precondition (e.g. not a ground state).
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Two energies or coupling values tied within tolerance.
    #[error("degenerate disorder: {0}")]
    Degenerate(String),

    /// Tie audit kept failing after the retry cap.
    #[error("tie audit failed after {attempts} resampling attempts: {detail}")]
    TieAudit { attempts: u32, detail: String },

    /// A postcondition check failed; points at a solver bug or tolerance breach.
    #[error("verification failed: {0}")]
    Verification(String),

    /// Results that contradict a theorem the code relies on.
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    /// Unknown suite, event, statistic, or malformed option.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl LabError {
    pub fn is_degenerate(&self) -> bool {
        matches!(self, LabError::Degenerate(_))
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
