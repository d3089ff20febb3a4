use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("singularity at x = {x}: {what}")]
    Singularity { x: f64, what: String },

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("non-finite integrand value {value} at node {x}")]
    Evaluation { x: f64, value: String },

    #[error("no convergence after {iters} iterations (residual {residual:e})")]
    Convergence { iters: usize, residual: f64 },

    #[error("type error: {0}")]
    Type(String),
}

pub type Result<T> = std::result::Result<T, Error>;
