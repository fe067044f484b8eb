//! Maximization of `σ₁·L` over boundary conformal densities on a fixed mesh,
//! and the immersion read off the maximizer's first eigenspace.

mod density;
mod derivative;
mod gauge;
mod immersion;
mod optimize;

pub use density::{DensityParam, Parametrization};
pub use derivative::{
    eigenvalue_directional_derivative, leading_cluster, objective_directional_derivative, ClusterDerivative,
    DerivativeInterval,
};
pub use gauge::{mobius_fit, MobiusFit};
pub use immersion::{extract_immersion, minimality_residuals, Immersion, MinimalityReport};
pub use optimize::{min_norm_subgradient, optimize_density, HistoryRow, OptimizeOptions, OptimizeResult, Termination};

use crate::geometry::GeometryError;
use crate::steklov::SteklovError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ShapeOptError {
    #[error("invalid input: {detail}")]
    InvalidInput { detail: String },
    #[error(transparent)]
    Steklov(#[from] SteklovError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
