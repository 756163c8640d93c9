use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("singular matrix in {context}{}", cycle.map(|c| format!(" at cycle {c}")).unwrap_or_default())]
    Singular {
        context: &'static str,
        cycle: Option<usize>,
    },

    #[error("rank-{rank} subspace is not unique: eigenvalues {rank} and {} coincide", rank + 1)]
    DegenerateSubspace { rank: usize },

    #[error("{algorithm} diverged at iteration {iteration} on node {node}")]
    Diverged {
        algorithm: String,
        iteration: usize,
        node: usize,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
