use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows} rows, row {row} has {cols} columns)")]
    NonSquare { rows: usize, row: usize, cols: usize },

    #[error("negative off-diagonal weight {value} at ({row}, {col})")]
    NegativeWeight { row: usize, col: usize, value: f64 },

    #[error("non-finite weight at ({row}, {col})")]
    NonFiniteWeight { row: usize, col: usize },

    #[error("invalid {field}: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("node index {index} out of range for {len} nodes")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric: asymmetry {deviation:e} exceeds {tolerance:e}")]
    Asymmetric { deviation: f64, tolerance: f64 },

    /// Irreducibility was required. Reducible networks are handled by pinning a
    /// node of the unique root block (see `NetworkStructure::root_components`).
    #[error(
        "coupling matrix is reducible ({components} strongly connected components); \
         pin a node of the root block instead (root-scc strategy)"
    )]
    Reducible { components: usize },

    #[error("network has no spanning tree ({roots} root components)")]
    NoSpanningTree { roots: usize },

    #[error("Perron vector did not converge after {iterations} iterations (residual {residual:e})")]
    PerronNotConverged { iterations: usize, residual: f64 },

    #[error("eigenpair residual {residual:e} exceeds bound {bound:e}")]
    EigenResidual { residual: f64, bound: f64 },

    #[error("non-finite {what}")]
    NonFinite { what: &'static str },

    #[error("trajectory diverged at t = {time} (RK4 stage {stage})")]
    Diverged { time: f64, stage: usize },

    #[error(
        "no candidate Delta makes the sampled QUAD quantity negative (best maximum {best_max:e}); \
         try a larger Delta grid or a tighter sampling box"
    )]
    QuadInfeasible { best_max: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { field, reason: reason.into() }
}
