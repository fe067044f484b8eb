//! Discrete Steklov eigenproblem: P1 stiffness against boundary mass, solved
//! through the Dirichlet-to-Neumann Schur complement or the full pencil.

mod assembly;
mod spectrum;

pub use assembly::{
    assemble_boundary_mass, assemble_boundary_mass_on, assemble_boundary_mass_with, assemble_stiffness,
    assemble_stiffness_on, boundary_edge_lengths,
    boundary_length, MassKind,
};
pub use spectrum::{
    cluster_ranges, dtn_matrix, eigenfunctions_csv, full_pencil_spectrum, sigma1_l, spectrum_csv, steklov_spectrum,
    steklov_spectrum_with, DtnMatrix, SolverOptions, SteklovProblem, SteklovSpectrum, CLUSTER_TOL,
};

use crate::geometry::GeometryError;
use crate::linalg::LinalgError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SteklovError {
    #[error("triangle {triangle} is degenerate (area {area:e})")]
    DegenerateTriangle { triangle: usize, area: f64 },
    #[error("solver failure: {detail}")]
    SolverFailure { detail: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

impl From<LinalgError> for SteklovError {
    fn from(e: LinalgError) -> Self {
        SteklovError::SolverFailure { detail: e.to_string() }
    }
}
