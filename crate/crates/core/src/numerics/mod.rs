//! Dense complex linear algebra, special functions and root finding.

mod eigen;
mod matrix;
mod roots;
mod special;

pub use eigen::{
    hermitian_eigendecompose, hermitian_eigendecompose_with, hermitian_eigenvalues,
    EigenConfig, EigenDecomposition,
};
pub use matrix::{kron, kron_all, partial_transpose, ComplexMatrix, DensityMatrix, MAX_DIM};
pub use roots::{bisect, bisect_log};
pub use special::{binomial, gamma, ln_binomial, log_gamma, log_sum_exp};
