//! The candidate free-boundary minimal immersion `Φ = s(u₁, …, u_N)` built
//! from the first eigenspace, and its residuals.

use nalgebra::DMatrix;

use crate::steklov::{SteklovProblem, SteklovSpectrum};

use super::derivative::leading_cluster;

#[derive(Clone, Debug)]
pub struct Immersion {
    pub n: usize,
    pub sigma1: f64,
    pub eigenvalues: Vec<f64>,
    /// Scaled coordinates, one column per eigenfunction, one row per vertex.
    pub coords: DMatrix<f64>,
    pub scale: f64,
    /// `(1/L)∫_∂ Φ_iΦ_j`, close to `I/N` for a balanced immersion.
    pub gram: DMatrix<f64>,
}

impl Immersion {
    pub fn scaled(&self, c: f64) -> Self {
        Self { coords: &self.coords * c, scale: self.scale * c, gram: &self.gram * (c * c), ..self.clone() }
    }

    /// The same immersion with its eigenbasis rotated by `q`.
    pub fn rotated(&self, q: &DMatrix<f64>) -> Self {
        Self { coords: &self.coords * q, gram: q.transpose() * &self.gram * q, ..self.clone() }
    }
}

/// Coordinates from the `σ₁` cluster (relative gap `cluster_tol`) with one
/// least-squares scale `s² = Σ q_b / Σ q_b²`, `q_b = |u(b)|²` over boundary vertices.
pub fn extract_immersion(spectrum: &SteklovSpectrum, problem: &SteklovProblem, cluster_tol: f64) -> Immersion {
    let cluster = leading_cluster(spectrum, cluster_tol);
    let n = cluster.len();
    let u = spectrum.eigenfunctions.columns(cluster.start, n).into_owned();
    let boundary = &problem.dtn.boundary;
    let q: Vec<f64> = boundary.iter().map(|&b| u.row(b).norm_squared()).collect();
    let s2 = q.iter().sum::<f64>() / q.iter().map(|x| x * x).sum::<f64>();
    let scale = s2.sqrt();
    let coords = u * scale;
    let bc = problem.mass.mul_dense(&coords);
    let gram = coords.transpose() * bc / problem.boundary_length;
    Immersion {
        n,
        sigma1: spectrum.eigenvalues[1],
        eigenvalues: cluster.map(|k| spectrum.eigenvalues[k]).collect(),
        coords,
        scale,
        gram,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinimalityReport {
    /// `‖AΦ − σ₁BΦ‖_F / (σ₁‖BΦ‖_F)`.
    pub harmonicity: f64,
    /// `max_b | |Φ(b)|² − 1 |`.
    pub sphere_deviation: f64,
    /// `max_b |(SΦ)_b/m_b − σ₁Φ_b| / max_b |σ₁Φ_b|`, `S` the DtN matrix, `m` the lumped mass.
    pub angle: f64,
}

pub fn minimality_residuals(phi: &Immersion, problem: &SteklovProblem) -> MinimalityReport {
    let s1 = phi.sigma1;
    let au = problem.stiffness.mul_dense(&phi.coords);
    let bu = problem.mass.mul_dense(&phi.coords);
    let harmonicity = (&au - &bu * s1).norm() / (s1 * bu.norm());
    let boundary = &problem.dtn.boundary;
    let sphere_deviation = boundary.iter().map(|&b| (phi.coords.row(b).norm_squared() - 1.0).abs()).fold(0.0, f64::max);
    let phib = DMatrix::from_fn(boundary.len(), phi.n, |i, j| phi.coords[(boundary[i], j)]);
    let sphib = &problem.dtn.matrix * &phib;
    let lumped: Vec<f64> = boundary.iter().map(|&b| problem.mass.row(b).map(|(_, v)| v).sum()).collect();
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for i in 0..boundary.len() {
        let r = (sphib.row(i) / lumped[i] - phib.row(i) * s1).norm();
        num = num.max(r);
        den = den.max(s1 * phib.row(i).norm());
    }
    MinimalityReport { harmonicity, sphere_deviation, angle: num / den }
}
