//! Dense linear algebra, standardization, Gaussian sampling and matrix I/O.

pub mod io;
mod linalg;
mod matrix;
mod random;
mod standardize;

pub use linalg::{
    cholesky, gen_positive_def, sample_gaussian, spd_inverse, symmetric_eigenvalues,
};
pub(crate) use linalg::sample_gaussian_with;
pub use matrix::{dot, DenseMatrix};
pub use random::{normal, normals, Seed};
pub use standardize::{standardize, StandardizeReport};
