//! Dense complex linear algebra used throughout the crate.

mod linalg;
mod matrix;
mod state;

pub use linalg::{
    complete_orthonormal, hermitian_eigen, min_norm_solve, min_norm_solve_with, null_space,
    numeric_rank, psd_sqrt, residual_norm, singular_values, trace_norm, MinNormSolution,
    SolveOptions, Svd, DEFAULT_RELATIVE_RANK_TOL, DEFAULT_RESIDUAL_TOL,
};
pub use matrix::{ComplexMatrix, C64, ONE, ZERO};
pub use state::{fidelity, fidelity_mixed, DensityMatrix, PureState};

/// Hamming weight of a computational basis index.
pub fn hamming_weight(index: usize) -> usize {
    index.count_ones() as usize
}
