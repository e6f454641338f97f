use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("linear system is inconsistent: residual {residual:e} exceeds {tolerance:e}")]
    RankDeficientInconsistent { residual: f64, tolerance: f64 },

    #[error("quadrature did not converge (last change {last_change:e})")]
    QuadratureNotConverged { last_change: f64 },

    #[error("solved weights are not a probability vector: {weights:?}")]
    InfeasibleWeights { weights: Vec<f64> },

    #[error("no invertible sign basis found for {n_qubits} qubits")]
    BasisSearchFailed { n_qubits: usize },

    #[error("weight system is singular (rank {rank} < {expected})")]
    SingularSystem { rank: usize, expected: usize },

    #[error(
        "decomposition does not reproduce the target channel (max deviation {max_deviation:e})"
    )]
    VerificationFailed { max_deviation: f64 },

    #[error("phase search failed: best residual {best_residual:e} above {tolerance:e}")]
    SearchFailed { best_residual: f64, tolerance: f64 },

    #[error("Fock cutoff {cutoff} too small for |sG|^2 = {displacement:.4}")]
    CutoffTooSmall { cutoff: usize, displacement: f64 },

    #[error("restoration scheme unavailable: {0}")]
    SchemeUnavailable(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dims(rows: usize, cols: usize) -> String {
    format!("{rows}x{cols}")
}
