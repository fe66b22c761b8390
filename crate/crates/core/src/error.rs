use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("line {line}: duplicate index tuple {indices:?} (merging disabled)")]
    DuplicateTuple { line: usize, indices: Vec<u64> },

    #[error("input contains no nonzero elements")]
    EmptyInput,

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("element {position}: {reason}")]
    InvalidElement { position: usize, reason: String },

    #[error("requested {nnz} nonzeros but the index space only holds {capacity}")]
    CapacityExceeded { nnz: u128, capacity: u128 },

    #[error("mode {mode} out of range for a {order}-mode tensor")]
    ModeOutOfRange { mode: usize, order: usize },

    #[error("partition count must be at least 1")]
    ZeroPartitions,

    #[error("mode {0} has no nonzero indices to distribute")]
    EmptyMode(usize),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("non-finite value produced by element {position} (mode {mode}, row {row})")]
    NonFinite { mode: usize, position: usize, row: usize },

    #[error("partition instance too large for exhaustive search: {vertices} vertices, kappa {kappa}")]
    OverBudget { vertices: usize, kappa: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
