//! Dense complex linear algebra for dimensions up to 16.

mod eig;
mod matrix;
mod propagate;
mod svd3;

pub(crate) use eig::clamp_floor;
pub use eig::{hermitian_eig, hermitian_eig_with_tol, psd_sqrt, HermitianEigenSystem};
pub use matrix::{inner, kron, norm, ComplexMatrix, MAX_DIM};
pub use propagate::{
    expm, propagate_expm, propagate_linear, propagate_linear_grid, propagate_linear_grid_stats,
    StepStats,
};
pub use svd3::{cross, det3, frobenius3, mat3_mul, sub3, svd3, transpose3, Mat3, Svd3, IDENTITY3};
