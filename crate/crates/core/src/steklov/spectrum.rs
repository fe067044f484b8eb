use std::ops::Range;

use nalgebra::DMatrix;

use crate::geometry::io::fmt_f64;
use crate::geometry::{ConformalMetric, Mesh};
use crate::linalg::dense::{column, gen_sym_eig, symmetrize};
use crate::linalg::subspace::{lowest_eigenpairs, SubspaceOptions};
use crate::linalg::{SparseCholesky, SymMatrix};

use super::assembly::{assemble_boundary_mass_with, assemble_stiffness, boundary_length, MassKind};
use super::SteklovError;

/// Relative gap below which neighbouring eigenvalues form one cluster.
pub const CLUSTER_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct SolverOptions {
    pub mass: MassKind,
    pub cluster_tol: f64,
    /// Solve the full pencil by shifted subspace iteration instead of the
    /// dense Schur-complement route.
    pub full_pencil: bool,
    pub subspace: SubspaceOptions,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { mass: MassKind::Consistent, cluster_tol: CLUSTER_TOL, full_pencil: false, subspace: SubspaceOptions::default() }
    }
}

/// Schur complement of the stiffness onto the boundary vertices, with the
/// discrete harmonic extension `u_I = E u_B`.
#[derive(Clone, Debug)]
pub struct DtnMatrix {
    pub boundary: Vec<usize>,
    pub interior: Vec<usize>,
    pub matrix: DMatrix<f64>,
    pub extension: DMatrix<f64>,
}

impl DtnMatrix {
    pub fn from_stiffness(a: &SymMatrix, boundary: Vec<usize>) -> Result<Self, SteklovError> {
        let n = a.dim();
        if boundary.is_empty() {
            return Err(SteklovError::SolverFailure { detail: "mesh has no boundary vertices".into() });
        }
        let mut is_b = vec![false; n];
        for &b in &boundary {
            is_b[b] = true;
        }
        let interior: Vec<usize> = (0..n).filter(|&i| !is_b[i]).collect();
        let abb = a.block_dense(&boundary, &boundary);
        let (mut matrix, extension) = if interior.is_empty() {
            (abb, DMatrix::zeros(0, boundary.len()))
        } else {
            let aii = SparseCholesky::factor(&a.principal(&interior)).map_err(|e| SteklovError::SolverFailure {
                detail: format!("interior stiffness block: {e}"),
            })?;
            let aib = a.block_dense(&interior, &boundary);
            let x = aii.solve_many(&aib);
            (abb - aib.transpose() * &x, -x)
        };
        symmetrize(&mut matrix);
        Ok(Self { boundary, interior, matrix, extension })
    }

    pub fn dim(&self) -> usize {
        self.boundary.len()
    }

    /// Full vertex vector from boundary values via harmonic extension.
    pub fn extend(&self, ub: &[f64], n: usize) -> Vec<f64> {
        let mut u = vec![0.0; n];
        for (k, &b) in self.boundary.iter().enumerate() {
            u[b] = ub[k];
        }
        if !self.interior.is_empty() {
            let ui = &self.extension * nalgebra::DVector::from_column_slice(ub);
            for (k, &i) in self.interior.iter().enumerate() {
                u[i] = ui[k];
            }
        }
        u
    }

    pub fn to_sym(&self) -> SymMatrix {
        let n = self.dim();
        SymMatrix::from_entries(
            n,
            (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).map(|(i, j)| (i, j, self.matrix[(i, j)])),
        )
    }
}

pub fn dtn_matrix(mesh: &Mesh, metric: &ConformalMetric) -> Result<DtnMatrix, SteklovError> {
    let a = assemble_stiffness(mesh, metric)?;
    DtnMatrix::from_stiffness(&a, mesh.boundary_vertices())
}

#[derive(Clone, Debug)]
pub struct SteklovSpectrum {
    pub eigenvalues: Vec<f64>,
    /// Columns are eigenfunctions over all vertices, `∫_∂ u² dl = 1`.
    pub eigenfunctions: DMatrix<f64>,
    pub clusters: Vec<Range<usize>>,
    pub boundary_length: f64,
    /// `‖A u − σ B u‖ / ‖u‖` per pair.
    pub residuals: Vec<f64>,
}

impl SteklovSpectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenfunction(&self, k: usize) -> Vec<f64> {
        column(&self.eigenfunctions, k)
    }

    pub fn cluster_of(&self, k: usize) -> Range<usize> {
        self.clusters.iter().find(|c| c.contains(&k)).cloned().unwrap_or(k..k + 1)
    }

    pub fn cluster_id(&self, k: usize) -> usize {
        self.clusters.iter().position(|c| c.contains(&k)).unwrap_or(usize::MAX)
    }

    pub fn sigma1_l(&self) -> f64 {
        self.eigenvalues[1] * self.boundary_length
    }
}

/// Groups ascending values whose consecutive relative gap is at most `tol`.
pub fn cluster_ranges(values: &[f64], tol: f64) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=values.len() {
        let split = k == values.len() || {
            let scale = values[k].abs().max(values[k - 1].abs());
            values[k] - values[k - 1] > tol * scale
        };
        if split {
            out.push(start..k);
            start = k;
        }
    }
    out
}

/// Assembled pencil of a mesh; the stiffness and its Schur complement do not
/// depend on the conformal factor and are reused by [`SteklovProblem::with_metric`].
#[derive(Clone, Debug)]
pub struct SteklovProblem {
    pub stiffness: SymMatrix,
    pub mass: SymMatrix,
    pub dtn: DtnMatrix,
    pub boundary_length: f64,
    pub mass_kind: MassKind,
}

impl SteklovProblem {
    pub fn new(mesh: &Mesh, metric: &ConformalMetric, mass_kind: MassKind) -> Result<Self, SteklovError> {
        if !mesh.is_connected() {
            return Err(SteklovError::SolverFailure { detail: "mesh is not connected".into() });
        }
        let stiffness = assemble_stiffness(mesh, metric)?;
        let mass = assemble_boundary_mass_with(mesh, metric, mass_kind)?;
        let dtn = DtnMatrix::from_stiffness(&stiffness, mesh.boundary_vertices())?;
        Ok(Self { stiffness, mass, dtn, boundary_length: boundary_length(mesh, metric), mass_kind })
    }

    pub fn with_metric(&self, mesh: &Mesh, metric: &ConformalMetric) -> Result<Self, SteklovError> {
        Ok(Self {
            stiffness: self.stiffness.clone(),
            mass: assemble_boundary_mass_with(mesh, metric, self.mass_kind)?,
            dtn: self.dtn.clone(),
            boundary_length: boundary_length(mesh, metric),
            mass_kind: self.mass_kind,
        })
    }

    fn residuals(&self, values: &[f64], vectors: &DMatrix<f64>) -> Vec<f64> {
        let au = self.stiffness.mul_dense(vectors);
        let bu = self.mass.mul_dense(vectors);
        values
            .iter()
            .enumerate()
            .map(|(k, &s)| (au.column(k) - bu.column(k) * s).norm() / vectors.column(k).norm())
            .collect()
    }

    /// Lowest `count + 1` eigenpairs through the boundary Schur complement.
    pub fn solve(&self, count: usize, cluster_tol: f64) -> Result<SteklovSpectrum, SteklovError> {
        let nb = self.dtn.dim();
        let m = count + 1;
        if m > nb {
            return Err(SteklovError::SolverFailure { detail: format!("{m} eigenpairs requested, boundary dimension {nb}") });
        }
        let bbb = self.mass.block_dense(&self.dtn.boundary, &self.dtn.boundary);
        let eig = gen_sym_eig(&self.dtn.matrix, &bbb).map_err(|e| SteklovError::SolverFailure {
            detail: format!("boundary pencil reduction: {e}"),
        })?;
        let n = self.stiffness.dim();
        let mut vectors = DMatrix::zeros(n, m);
        for k in 0..m {
            let u = self.dtn.extend(&column(&eig.vectors, k), n);
            vectors.set_column(k, &nalgebra::DVector::from_vec(u));
        }
        let clusters = clip_clusters(cluster_ranges(&eig.values, cluster_tol), m);
        let values = eig.values[..m].to_vec();
        let residuals = self.residuals(&values, &vectors);
        Ok(SteklovSpectrum { eigenvalues: values, eigenfunctions: vectors, clusters, boundary_length: self.boundary_length, residuals })
    }

    /// Lowest `count + 1` eigenpairs of the full pencil by shifted subspace iteration.
    pub fn solve_full_pencil(&self, count: usize, opts: &SolverOptions) -> Result<SteklovSpectrum, SteklovError> {
        let m = count + 1;
        let sub = SubspaceOptions { shift: 1.0 / self.boundary_length, ..opts.subspace.clone() };
        let r = lowest_eigenpairs(&self.stiffness, &self.mass, m, &sub)?;
        let mut vectors = r.vectors;
        for k in 0..m {
            let u = column(&vectors, k);
            let norm = self.mass.quad_form(&u).sqrt();
            vectors.column_mut(k).scale_mut(1.0 / norm);
        }
        let clusters = cluster_ranges(&r.values, opts.cluster_tol);
        let residuals = self.residuals(&r.values, &vectors);
        Ok(SteklovSpectrum {
            eigenvalues: r.values,
            eigenfunctions: vectors,
            clusters,
            boundary_length: self.boundary_length,
            residuals,
        })
    }
}

fn clip_clusters(clusters: Vec<Range<usize>>, m: usize) -> Vec<Range<usize>> {
    clusters.into_iter().filter(|c| c.start < m).map(|c| c.start..c.end.min(m)).collect()
}

pub fn steklov_spectrum(mesh: &Mesh, metric: &ConformalMetric, count: usize) -> Result<SteklovSpectrum, SteklovError> {
    steklov_spectrum_with(mesh, metric, count, &SolverOptions::default())
}

pub fn steklov_spectrum_with(
    mesh: &Mesh,
    metric: &ConformalMetric,
    count: usize,
    opts: &SolverOptions,
) -> Result<SteklovSpectrum, SteklovError> {
    if count == 0 {
        return Err(SteklovError::SolverFailure { detail: "count must be at least 1".into() });
    }
    let problem = SteklovProblem::new(mesh, metric, opts.mass)?;
    if opts.full_pencil {
        problem.solve_full_pencil(count, opts)
    } else {
        problem.solve(count, opts.cluster_tol)
    }
}

pub fn full_pencil_spectrum(mesh: &Mesh, metric: &ConformalMetric, count: usize) -> Result<SteklovSpectrum, SteklovError> {
    steklov_spectrum_with(mesh, metric, count, &SolverOptions { full_pencil: true, ..SolverOptions::default() })
}

/// `σ₁ · L`, invariant under constant shifts of the conformal factor.
pub fn sigma1_l(mesh: &Mesh, metric: &ConformalMetric) -> Result<f64, SteklovError> {
    Ok(steklov_spectrum(mesh, metric, 1)?.sigma1_l())
}

pub fn spectrum_csv(spec: &SteklovSpectrum) -> String {
    let mut out = String::from("index,sigma,cluster_id,boundary_norm_residual\n");
    for (k, s) in spec.eigenvalues.iter().enumerate() {
        out.push_str(&format!("{k},{},{},{}\n", fmt_f64(*s), spec.cluster_id(k), fmt_f64(spec.residuals[k])));
    }
    out
}

/// One row per vertex, one column per eigenfunction.
pub fn eigenfunctions_csv(spec: &SteklovSpectrum) -> String {
    let m = spec.len();
    let mut out = String::from("vertex");
    for k in 0..m {
        out.push_str(&format!(",u{k}"));
    }
    out.push('\n');
    for i in 0..spec.eigenfunctions.nrows() {
        out.push_str(&i.to_string());
        for k in 0..m {
            out.push(',');
            out.push_str(&fmt_f64(spec.eigenfunctions[(i, k)]));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_disk_mesh;

    #[test]
    fn disk_low_spectrum() {
        let m = build_disk_mesh(4);
        let g = ConformalMetric::flat(m.num_vertices());
        let s = steklov_spectrum(&m, &g, 5).unwrap();
        assert!(s.eigenvalues[0].abs() < 1e-10);
        for (k, want) in [(1, 1.0), (2, 1.0), (3, 2.0), (4, 2.0), (5, 3.0)] {
            assert!((s.eigenvalues[k] - want).abs() < 0.02 * want, "{k}: {}", s.eigenvalues[k]);
        }
        assert_eq!(s.cluster_of(1), 1..3);
        assert_eq!(s.cluster_of(3), 3..5);
        assert!(s.residuals.iter().all(|r| *r < 1e-8), "{:?}", s.residuals);
    }

    #[test]
    fn dtn_kills_constants() {
        let m = build_disk_mesh(3);
        let d = dtn_matrix(&m, &ConformalMetric::flat(m.num_vertices())).unwrap();
        let ones = nalgebra::DVector::from_element(d.dim(), 1.0);
        assert!((&d.matrix * ones).amax() < 1e-12);
    }

    #[test]
    fn clusters_by_relative_gap() {
        let c = cluster_ranges(&[0.0, 1.0, 1.0 + 1e-9, 2.0], 1e-6);
        assert_eq!(c, vec![0..1, 1..3, 3..4]);
    }
}
