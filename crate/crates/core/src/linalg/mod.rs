//! Linear algebra and quadrature infrastructure shared by the solvers.

pub mod dense;
pub mod quadrature;
pub mod sparse;
pub mod subspace;
pub mod tridiag;

pub use sparse::{SparseCholesky, SymMatrix};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix of dimension {dim} is not positive definite")]
    NotPositiveDefinite { dim: usize },
    #[error("matrix of dimension {dim} is singular")]
    Singular { dim: usize },
    #[error("requested {requested} eigenpairs from a problem of dimension {dim}")]
    TooManyEigenpairs { requested: usize, dim: usize },
    #[error("iteration did not converge after {iterations} steps (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("bisection bracket [{lo}, {hi}] does not enclose the eigenvalue")]
    BracketFailure { lo: f64, hi: f64 },
}
