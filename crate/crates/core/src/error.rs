use thiserror::Error;

/// Crate-wide error type.
///
/// Precision errors are first-class: any computation that cannot resolve a
/// floor boundary within its precision budget must fail loudly rather than
/// round.
#[derive(Debug, Error)]
pub enum SympathError {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("inconsistent seed: {0}")]
    InconsistentSeed(String),

    #[error("precision error: {0}")]
    Precision(String),

    #[error("not a characteristic monodromy: {0}")]
    NotACharacteristic(String),

    #[error("spectral clustering ambiguous: {0}")]
    Ambiguity(String),

    #[error("degenerate crossing: {0}")]
    DegenerateCrossing(String),

    #[error("winding offset infeasible: {0}")]
    ParityInfeasible(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, SympathError>;
