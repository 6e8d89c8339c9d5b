use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    Dimension {
        what: String,
        expected: String,
        got: String,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("gauge block {block} is not numerically invertible (reciprocal condition {rcond:.3e})")]
    Invertibility { block: &'static str, rcond: f64 },

    #[error("invalid stability parameter: {0}")]
    Parameter(String),

    #[error("generation failed: {0}")]
    Generation(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("fiber lift failed: {0}")]
    Lift(String),

    #[error("commuting pair expected, commutator residual {residual:.3e}")]
    Commutation { residual: f64 },

    #[error("balancing flow did not converge after {iterations} iterations (final norm {norm:.3e})")]
    Flow { iterations: usize, norm: f64 },

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("invalid JSON content: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn dim(what: impl Into<String>, expected: (usize, usize), got: (usize, usize)) -> Self {
        Error::Dimension {
            what: what.into(),
            expected: format!("{}x{}", expected.0, expected.1),
            got: format!("{}x{}", got.0, got.1),
        }
    }
}
