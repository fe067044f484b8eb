//! First-order variation of the Steklov eigenvalues under a change `δψ` of the
//! boundary log-density. Edge `ab` has metric length `e^{(ω_a+ω_b)/2}ℓ`, so the
//! boundary mass varies by `Σ_e ½(δψ_a + δψ_b) B_e`.

use std::ops::Range;

use nalgebra::DMatrix;

use crate::geometry::{ConformalMetric, Mesh};
use crate::linalg::dense::{column, sym_eig_sorted};
use crate::steklov::{boundary_edge_lengths, MassKind, SteklovSpectrum};

/// One-sided derivatives: the extreme eigenvalues of the derivative form on the cluster.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivativeInterval {
    pub lo: f64,
    pub hi: f64,
}

impl DerivativeInterval {
    pub fn contains(&self, x: f64, slack: f64) -> bool {
        x >= self.lo - slack && x <= self.hi + slack
    }
}

/// Indices `k ≥ 1` with `σ_k ≤ σ₁(1 + tol)`.
pub fn leading_cluster(spectrum: &SteklovSpectrum, tol: f64) -> Range<usize> {
    let s1 = spectrum.eigenvalues[1];
    let end = (1..spectrum.len()).take_while(|&k| spectrum.eigenvalues[k] <= s1 * (1.0 + tol)).count() + 1;
    1..end
}

/// Per-vertex sensitivities of the cluster's mass Gram matrix and of the
/// boundary length.
#[derive(Clone, Debug)]
pub struct ClusterDerivative {
    pub sigma: Vec<f64>,
    pub length: f64,
    /// `mass[v]` is the `k×k` matrix `∂(u_iᵀBu_j)/∂ψ_v`.
    mass: Vec<(usize, DMatrix<f64>)>,
    /// `∂L/∂ψ_v`.
    length_rate: Vec<(usize, f64)>,
}

impl ClusterDerivative {
    pub fn new(mesh: &Mesh, metric: &ConformalMetric, kind: MassKind, spectrum: &SteklovSpectrum, cluster: Range<usize>) -> Self {
        let k = cluster.len();
        let vecs: Vec<Vec<f64>> = cluster.clone().map(|c| column(&spectrum.eigenfunctions, c)).collect();
        let sigma: Vec<f64> = cluster.map(|c| spectrum.eigenvalues[c]).collect();
        let lengths = boundary_edge_lengths(mesh, metric);
        let mut mass: std::collections::BTreeMap<usize, DMatrix<f64>> = Default::default();
        let mut rate: std::collections::BTreeMap<usize, f64> = Default::default();
        for (e, len) in mesh.boundary_edges.iter().zip(&lengths) {
            let w = DMatrix::from_fn(k, k, |i, j| {
                let (ua, ub, va, vb) = (vecs[i][e.a], vecs[i][e.b], vecs[j][e.a], vecs[j][e.b]);
                match kind {
                    MassKind::Consistent => len * ((ua * va + ub * vb) / 3.0 + (ua * vb + ub * va) / 6.0),
                    MassKind::Lumped => len * 0.5 * (ua * va + ub * vb),
                }
            });
            for v in [e.a, e.b] {
                let m = mass.entry(v).or_insert_with(|| DMatrix::zeros(k, k));
                *m += &w * 0.5;
                *rate.entry(v).or_insert(0.0) += 0.5 * len;
            }
        }
        Self { sigma, length: lengths.iter().sum(), mass: mass.into_iter().collect(), length_rate: rate.into_iter().collect() }
    }

    pub fn size(&self) -> usize {
        self.sigma.len()
    }

    fn pairing(&self, dir: &[(usize, f64)]) -> (DMatrix<f64>, f64) {
        let k = self.size();
        let lookup: std::collections::HashMap<usize, f64> = dir.iter().copied().collect();
        let mut m = DMatrix::zeros(k, k);
        for (v, mv) in &self.mass {
            if let Some(d) = lookup.get(v) {
                m += mv * *d;
            }
        }
        let dl = self.length_rate.iter().filter_map(|(v, r)| lookup.get(v).map(|d| d * r)).sum();
        (m, dl)
    }

    /// `−½(σ_i + σ_j) δ(u_iᵀBu_j)`, the derivative of the eigenvalues on the cluster.
    pub fn sigma_matrix(&self, dir: &[(usize, f64)]) -> DMatrix<f64> {
        let (m, _) = self.pairing(dir);
        DMatrix::from_fn(self.size(), self.size(), |i, j| -0.5 * (self.sigma[i] + self.sigma[j]) * m[(i, j)])
    }

    /// Derivative form of `σ·L` on the cluster.
    pub fn objective_matrix(&self, dir: &[(usize, f64)]) -> DMatrix<f64> {
        let (m, dl) = self.pairing(dir);
        DMatrix::from_fn(self.size(), self.size(), |i, j| {
            let ds = -0.5 * (self.sigma[i] + self.sigma[j]) * m[(i, j)] * self.length;
            if i == j {
                ds + self.sigma[i] * dl
            } else {
                ds
            }
        })
    }
}

fn interval_of(m: DMatrix<f64>) -> DerivativeInterval {
    let (vals, _) = sym_eig_sorted(m);
    DerivativeInterval { lo: vals[0], hi: *vals.last().expect("non-empty cluster") }
}

/// Derivative of `σ₁` along `δψ` (given as `(vertex, value)` pairs); an
/// interval when `σ₁` belongs to a cluster of the spectrum.
pub fn eigenvalue_directional_derivative(
    mesh: &Mesh,
    metric: &ConformalMetric,
    kind: MassKind,
    spectrum: &SteklovSpectrum,
    delta: &[(usize, f64)],
) -> DerivativeInterval {
    let d = ClusterDerivative::new(mesh, metric, kind, spectrum, spectrum.cluster_of(1));
    interval_of(d.sigma_matrix(delta))
}

/// Derivative of `σ₁·L` along `δψ`.
pub fn objective_directional_derivative(
    mesh: &Mesh,
    metric: &ConformalMetric,
    kind: MassKind,
    spectrum: &SteklovSpectrum,
    delta: &[(usize, f64)],
) -> DerivativeInterval {
    let d = ClusterDerivative::new(mesh, metric, kind, spectrum, spectrum.cluster_of(1));
    interval_of(d.objective_matrix(delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_annulus_mesh;
    use crate::steklov::SteklovProblem;

    fn bump(mesh: &Mesh) -> Vec<(usize, f64)> {
        mesh.boundary_vertices().into_iter().map(|v| (v, (3.0 * mesh.vertices[v][0]).sin() + 0.5 * mesh.vertices[v][1])).collect()
    }

    #[test]
    fn finite_differences_agree_to_second_order() {
        let mesh = build_annulus_mesh(0.35, 2);
        let n = mesh.num_vertices();
        let mut base = ConformalMetric::flat(n);
        for v in mesh.boundary_vertices() {
            base.log_factor[v] = 0.3 * mesh.vertices[v][0] + 0.1 * mesh.vertices[v][1].powi(2);
        }
        let dir = bump(&mesh);
        let eval = |h: f64| {
            let mut g = base.clone();
            for &(v, d) in &dir {
                g.log_factor[v] += h * d;
            }
            let p = SteklovProblem::new(&mesh, &g, MassKind::Consistent).unwrap();
            let s = p.solve(2, 1e-6).unwrap();
            (s.eigenvalues[1], s.eigenvalues[1] * p.boundary_length)
        };
        let p = SteklovProblem::new(&mesh, &base, MassKind::Consistent).unwrap();
        let spec = p.solve(2, 1e-6).unwrap();
        assert_eq!(spec.cluster_of(1).len(), 1);
        let ds = eigenvalue_directional_derivative(&mesh, &base, MassKind::Consistent, &spec, &dir);
        let df = objective_directional_derivative(&mesh, &base, MassKind::Consistent, &spec, &dir);
        assert_eq!(ds.lo, ds.hi);
        let gap = |h: f64| {
            let (a, b) = (eval(h), eval(-h));
            (((a.0 - b.0) / (2.0 * h) - ds.lo).abs(), ((a.1 - b.1) / (2.0 * h) - df.lo).abs())
        };
        let (g1, g2) = (gap(1e-2), gap(5e-3));
        assert!(g1.0 < 1e-3 && g1.1 < 1e-3, "{g1:?}");
        let ratio = g1.0 / g2.0;
        assert!((3.0..5.0).contains(&ratio), "{ratio} {g1:?} {g2:?}");
    }

    #[test]
    fn constant_shift_leaves_the_product_unchanged() {
        let mesh = build_annulus_mesh(0.35, 2);
        let g = ConformalMetric::flat(mesh.num_vertices());
        let p = SteklovProblem::new(&mesh, &g, MassKind::Consistent).unwrap();
        let spec = p.solve(3, 1e-6).unwrap();
        let ones: Vec<(usize, f64)> = mesh.boundary_vertices().into_iter().map(|v| (v, 1.0)).collect();
        let d = objective_directional_derivative(&mesh, &g, MassKind::Consistent, &spec, &ones);
        assert!(d.lo.abs() < 1e-10 && d.hi.abs() < 1e-10, "{d:?}");
        let s = eigenvalue_directional_derivative(&mesh, &g, MassKind::Consistent, &spec, &ones);
        assert!((s.lo + spec.eigenvalues[1]).abs() < 1e-10);
    }
}
