//! Independent numerical checks: quadrature, Gram matrices, finite-difference
//! Hamiltonians, eigenvalue extraction and Schrödinger residuals.

pub mod gram;
pub mod quadrature;
pub mod residual;
pub mod tridiag;

pub use gram::{gram_matrix, GramMatrix};
pub use quadrature::{gauss_legendre, integrate, DomainMap, QuadValue, Quadrature};
pub use residual::{schrodinger_residual, schrodinger_residual_with_energy};
pub use tridiag::{discretize, discretize_fn, eigen_near_shift, lowest_eigenvalues, EigenPair, TridiagonalOperator};
