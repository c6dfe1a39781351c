//! Dense complex linear algebra foundation: validated Hermitian and PSD
//! types, spectral decomposition with degeneracy clustering, and the damped
//! fixed-point (Lyapunov) solver everything else is built on.

mod fixed_point;
mod types;

pub use fixed_point::{damped_generator, solve_damped_fixed_point, solve_damped_fixed_point_dense};
pub use types::{
    eigenphases, unitary_eigenpairs, CMatrix, HermitianMatrix, MatrixData, PsdMatrix,
    SpectralDecomposition, C64,
};

pub(crate) use fixed_point::solve_lyapunov_raw;
pub(crate) use types::EIG_MAX_ITER;
