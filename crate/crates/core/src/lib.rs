//! Exceptional X1 Laguerre/Jacobi polynomials, the point-canonical
//! transformation engine, rationally extended Hermitian and complex-shifted
//! potentials, and the numerical machinery that checks them.

pub mod cli;
pub mod error;
pub mod polycore;
pub mod numerics;
pub mod models;
pub mod pct;
pub mod xop;

pub use error::{Error, Result};
pub use polycore::Polynomial;
