use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("row {row}: diagonal entry {value:e} is not positive")]
    NonPositiveDiagonal { row: usize, value: f64 },

    #[error("incomplete factorization breakdown at row {row} (pivot {pivot:e})")]
    ZeroPivot { row: usize, pivot: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("cell {cell} is inverted or degenerate after distortion")]
    InvertedCell { cell: usize },

    #[error("tensor of cell {cell} is not symmetric positive definite")]
    NotSpd { cell: usize },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("singular local interaction system at vertex {vertex}")]
    SingularInteraction { vertex: usize },

    #[error("basis smoothing diverged at iteration {iteration} (max update {max_update:e})")]
    BasisDiverged { iteration: usize, max_update: f64 },

    #[error("singular coarse system: {0}")]
    SingularCoarse(String),

    #[error("cell adjacency graph is disconnected")]
    Disconnected,

    #[error("basis {0} has an empty support region")]
    EmptySupport(usize),

    #[error("case `{case}`: {inner}")]
    Case { case: String, inner: Box<Error> },

    #[error("{path}: {msg}")]
    Parse { path: PathBuf, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }
}
