use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("unsupported coupling family: {0}")]
    UnsupportedFamily(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("site index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("arity mismatch: {sources} sources vs {targets} targets")]
    Arity { sources: usize, targets: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("chain too short: n = {n}, need at least {min}")]
    ChainTooShort { n: usize, min: usize },

    #[error("invalid coherence order {0}")]
    InvalidOrder(i32),

    #[error("{phase_steps} phase steps alias coherence order {max_order} (need more than {})", 2 * max_order)]
    Aliasing { phase_steps: usize, max_order: usize },

    #[error("n = {n} exceeds the oracle budget of {max_n} spins")]
    OverBudget { n: usize, max_n: usize },

    #[error("bad Pauli letter {0:?}")]
    BadPauliLetter(char),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
