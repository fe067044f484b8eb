//! The thin-part reduced eigenproblem on `(θ̄, θ̄_v)`, mass balancing through
//! the dilation `t`, the coupled thick–thin solver and the combined
//! two-mode test function.

mod choose_t;
mod combined;
mod coupled;
mod fem;
mod model;

pub use choose_t::{choose_t_for_mass, first_cluster_thin_mass, MassChoice, MassChoiceOptions};
pub use combined::{combined_test_function, gram_from_fem, select_second_mode, CombinedBound, ThinGram};
pub use coupled::{coupled_solve, coupled_solve_prepared, CoupledOptions, CoupledSolution, InterfaceSystem};
pub use fem::{analyze_glued, coupling_from_fem, reduced_state_from_fem, CouplingData, GluedModes, SplitForms};
pub use model::{
    arc_factor, discrete_dirichlet_sigma, grid_derivative, orient, solve_reduced, trapezoid, BoundaryConditions,
    EndCondition, ReducedDiagnostics, ReducedOptions, ReducedState,
};

use crate::geometry::GeometryError;
use crate::steklov::SteklovError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Reduced1dError {
    #[error("no convergence: {detail}")]
    NoConvergence { detail: String },
    #[error("bracket failure: {detail} (M(t₀) = {lo_mass}, M(t₁) = {hi_mass})")]
    BracketFailure { detail: String, lo_mass: f64, hi_mass: f64 },
    #[error("interface iteration stopped after {iterations} steps with residual {residual:e}")]
    InterfaceMismatch { iterations: usize, residual: f64 },
    #[error("|c₁| = {c1:e} is too small for the combined test function")]
    DegenerateC1 { c1: f64 },
    #[error("invalid input: {detail}")]
    InvalidInput { detail: String },
    #[error(transparent)]
    Steklov(#[from] SteklovError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
