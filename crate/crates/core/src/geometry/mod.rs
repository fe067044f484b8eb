//! Triangle meshes with per-triangle charts, conformal metrics, and the
//! construction of cusp-glued surfaces.

mod builders;
pub mod chart;
pub mod cusp;
pub mod glue;
pub mod io;
pub mod mesh;
pub mod refine;
pub mod topology;

pub use builders::{build_annulus_mesh, build_disk_mesh, build_square_mesh};
pub use cusp::{
    build_cusp_mesh, build_cusp_mesh_with, parabola_arc, truncation, BoundaryPoint, CuspMeshOptions, GlueParams,
    DEFAULT_ALPHA, TAG_BOTTOM, TAG_SIDE_MINUS, TAG_SIDE_PLUS, TAG_TOP,
};
pub use glue::{glue, glue_with, GlueOptions, GluedSurface, PreparedBase, SeamInterval};
pub use io::{read_mesh, write_mesh};
pub use mesh::{BoundaryEdge, ConformalMetric, Mesh, Point, SeamPosition, BASE_CHART, CUSP_CHART};
pub use topology::{is_orientable, topology_invariants, TopologySummary};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("invalid mesh: {detail}")]
    InvalidMesh { detail: String },
    #[error("degenerate geometry: {detail}")]
    DegenerateGeometry { detail: String },
    #[error("non-manifold mesh: {detail}")]
    NonManifold { detail: String },
    #[error("invalid conformal factor: {detail}")]
    InvalidMetric { detail: String },
    #[error("invalid parameters: {detail}")]
    InvalidParams { detail: String },
    #[error("parse error at line {line}: {detail}")]
    Parse { line: usize, detail: String },
    #[error("resolution mismatch: {detail}")]
    ResolutionMismatch { detail: String },
    #[error("orientation error: {detail}")]
    OrientationError { detail: String },
}
