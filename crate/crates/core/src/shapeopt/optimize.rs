//! Ascent on `σ₁·L` over boundary densities. Where `σ₁` is clustered the
//! objective is not differentiable; the step follows the minimum-norm element
//! of the convex hull `{⟨X, G⟩ : X ⪰ 0, tr X = 1}` of cluster gradients.

use nalgebra::DMatrix;

use crate::geometry::{ConformalMetric, Mesh};
use crate::linalg::dense::sym_eig_sorted;
use crate::steklov::{MassKind, SteklovProblem, SteklovSpectrum};

use super::density::DensityParam;
use super::derivative::{leading_cluster, ClusterDerivative};
use super::gauge::mobius_tangents;
use super::ShapeOptError;

#[derive(Clone, Debug)]
pub struct OptimizeOptions {
    pub max_iter: usize,
    /// Relative gap below which eigenvalues join the `σ₁` cluster.
    pub cluster_tol: f64,
    /// Stop once the minimum-norm ascent direction is this short.
    pub stationarity_tol: f64,
    pub armijo: f64,
    pub initial_step: f64,
    pub backtracks: usize,
    /// Smallest accepted increase of `σ₁·L`.
    pub ascent_tol: f64,
    pub mass: MassKind,
    /// Eigenpairs computed beyond `σ₁`.
    pub extra_modes: usize,
    /// On a unit-circle boundary, step only orthogonally to the boost orbit
    /// of the current density.
    pub mobius_slice: bool,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            cluster_tol: 1e-3,
            stationarity_tol: 1e-8,
            armijo: 1e-4,
            initial_step: 1.0,
            backtracks: 40,
            ascent_tol: 1e-10,
            mass: MassKind::Consistent,
            extra_modes: 5,
            mobius_slice: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HistoryRow {
    pub iter: usize,
    pub sigma1_l: f64,
    pub cluster_size: usize,
    pub step: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Stationary,
    /// No step of the backtracking budget increased `σ₁·L` by the ascent tolerance.
    Stalled,
    MaxIterations,
}

#[derive(Clone, Debug)]
pub struct OptimizeResult {
    pub density: DensityParam,
    pub metric: ConformalMetric,
    pub history: Vec<HistoryRow>,
    pub termination: Termination,
    pub spectrum: SteklovSpectrum,
    pub problem: SteklovProblem,
    pub sigma1_l: f64,
}

struct Point {
    density: DensityParam,
    metric: ConformalMetric,
    problem: SteklovProblem,
    spectrum: SteklovSpectrum,
    value: f64,
}

fn evaluate(
    mesh: &Mesh,
    base: &ConformalMetric,
    proto: &SteklovProblem,
    mut density: DensityParam,
    opts: &OptimizeOptions,
) -> Result<Point, ShapeOptError> {
    density.normalize(mesh, base);
    let metric = density.metric(base);
    let problem = proto.with_metric(mesh, &metric)?;
    let spectrum = problem.solve(1 + opts.extra_modes, crate::steklov::CLUSTER_TOL)?;
    let value = spectrum.eigenvalues[1] * problem.boundary_length;
    if !value.is_finite() {
        return Err(ShapeOptError::InvalidInput { detail: "non-finite objective".into() });
    }
    Ok(Point { density, metric, problem, spectrum, value })
}

/// Euclidean projection of a symmetric matrix onto `{X ⪰ 0, tr X = 1}`.
fn project_spectraplex(x: DMatrix<f64>) -> DMatrix<f64> {
    let (vals, vecs) = sym_eig_sorted(x);
    let mut sorted = vals.clone();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut tau = 0.0;
    for (k, v) in sorted.iter().enumerate() {
        acc += v;
        let t = (acc - 1.0) / (k + 1) as f64;
        if v - t > 0.0 {
            tau = t;
        }
    }
    let lam: Vec<f64> = vals.iter().map(|v| (v - tau).max(0.0)).collect();
    let n = lam.len();
    DMatrix::from_fn(n, n, |i, j| (0..n).map(|k| vecs[(i, k)] * lam[k] * vecs[(j, k)]).sum())
}

/// Minimum-norm element `g = (⟨X, G_p⟩)_p` over the spectraplex.
pub fn min_norm_subgradient(g: &[DMatrix<f64>]) -> (Vec<f64>, DMatrix<f64>) {
    let k = g.first().map_or(1, |m| m.nrows());
    let apply = |x: &DMatrix<f64>| -> Vec<f64> { g.iter().map(|gp| gp.dot(x)).collect() };
    let mut x = DMatrix::identity(k, k) / k as f64;
    if k == 1 {
        return (apply(&x), x);
    }
    let lip = 2.0 * g.iter().map(|gp| gp.norm_squared()).sum::<f64>();
    if lip == 0.0 {
        return (apply(&x), x);
    }
    for _ in 0..5000 {
        let v = apply(&x);
        let grad = g.iter().zip(&v).fold(DMatrix::zeros(k, k), |acc, (gp, vp)| acc + gp * (2.0 * vp));
        let next = project_spectraplex(&x - grad / lip);
        let change = (&next - &x).norm();
        x = next;
        if change < 1e-14 {
            break;
        }
    }
    (apply(&x), x)
}

/// Orthonormal basis of the coefficient directions whose density change is
/// orthogonal (arc-weighted) to both boost tangents.
fn slice_basis(mesh: &Mesh, density: &DensityParam, dirs: &[Vec<(usize, f64)>]) -> Option<DMatrix<f64>> {
    let (t, w) = mobius_tangents(mesh, density)?;
    let pos: std::collections::HashMap<usize, usize> = density.cycles[0].iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let np = dirs.len();
    let c = DMatrix::from_fn(2, np, |i, p| dirs[p].iter().map(|&(v, x)| t[i][pos[&v]] * w[pos[&v]] * x).sum());
    let svd = c.transpose().svd(true, false);
    let u = svd.u?;
    // Left singular vectors of Cᵀ beyond its rank span the null space of C.
    let full = nalgebra::linalg::QR::new(DMatrix::from_fn(np, np, |i, j| if j < 2 { u[(i, j)] } else if i == j { 1.0 } else { 0.0 }));
    let q = full.q();
    Some(q.columns(2, np - 2).into_owned())
}

/// Projected ascent on `σ₁·L` with unit-length renormalization and Armijo
/// backtracking; the history never decreases.
pub fn optimize_density(
    mesh: &Mesh,
    base: &ConformalMetric,
    init: DensityParam,
    opts: &OptimizeOptions,
) -> Result<OptimizeResult, ShapeOptError> {
    if !mesh.is_connected() || mesh.boundary_edges.is_empty() {
        return Err(ShapeOptError::InvalidInput { detail: "need a connected mesh with boundary".into() });
    }
    let proto = SteklovProblem::new(mesh, &init.metric(base), opts.mass)?;
    let mut cur = evaluate(mesh, base, &proto, init, opts)?;
    let dirs = cur.density.directions();
    let mut history = vec![HistoryRow {
        iter: 0,
        sigma1_l: cur.value,
        cluster_size: leading_cluster(&cur.spectrum, opts.cluster_tol).len(),
        step: 0.0,
    }];
    let mut step = opts.initial_step;
    let mut termination = Termination::MaxIterations;
    for iter in 1..=opts.max_iter {
        let cluster = leading_cluster(&cur.spectrum, opts.cluster_tol);
        let deriv = ClusterDerivative::new(mesh, &cur.metric, opts.mass, &cur.spectrum, cluster.clone());
        let g: Vec<DMatrix<f64>> = dirs.iter().map(|d| deriv.objective_matrix(d)).collect();
        let basis = if opts.mobius_slice { slice_basis(mesh, &cur.density, &dirs) } else { None };
        let dir = match &basis {
            Some(q) => {
                let gq: Vec<DMatrix<f64>> = (0..q.ncols())
                    .map(|j| g.iter().enumerate().fold(DMatrix::zeros(cluster.len(), cluster.len()), |acc, (p, gp)| acc + gp * q[(p, j)]))
                    .collect();
                let (d, _) = min_norm_subgradient(&gq);
                (q * nalgebra::DVector::from_vec(d)).iter().copied().collect()
            }
            None => min_norm_subgradient(&g).0,
        };
        let norm2: f64 = dir.iter().map(|x| x * x).sum();
        if norm2.sqrt() <= opts.stationarity_tol {
            termination = Termination::Stationary;
            break;
        }
        let mut accepted = None;
        let mut s = step;
        for _ in 0..opts.backtracks {
            let mut trial = cur.density.clone();
            trial.coeffs.iter_mut().zip(&dir).for_each(|(c, d)| *c += s * d);
            let p = evaluate(mesh, base, &proto, trial, opts)?;
            let gain = p.value - cur.value;
            if gain >= opts.ascent_tol.max(opts.armijo * s * norm2) {
                accepted = Some(p);
                break;
            }
            s *= 0.5;
        }
        let Some(next) = accepted else {
            termination = Termination::Stalled;
            break;
        };
        cur = next;
        history.push(HistoryRow {
            iter,
            sigma1_l: cur.value,
            cluster_size: leading_cluster(&cur.spectrum, opts.cluster_tol).len(),
            step: s,
        });
        step = (2.0 * s).min(1e3 * opts.initial_step);
    }
    Ok(OptimizeResult {
        sigma1_l: cur.value,
        density: cur.density,
        metric: cur.metric,
        history,
        termination,
        spectrum: cur.spectrum,
        problem: cur.problem,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_disk_mesh;
    use crate::shapeopt::Parametrization;
    use rand::SeedableRng;

    #[test]
    fn slice_directions_are_orthogonal_to_boosts() {
        let mesh = build_disk_mesh(3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let d = DensityParam::random(&mesh, Parametrization::default(), 0.3, &mut rng).unwrap();
        let dirs = d.directions();
        let q = slice_basis(&mesh, &d, &dirs).unwrap();
        assert_eq!(q.ncols(), dirs.len() - 2);
        assert!((q.transpose() * &q - DMatrix::identity(q.ncols(), q.ncols())).norm() < 1e-12);
        let (t, w) = mobius_tangents(&mesh, &d).unwrap();
        let pos: std::collections::HashMap<usize, usize> = d.cycles[0].iter().enumerate().map(|(k, &v)| (v, k)).collect();
        for j in 0..q.ncols() {
            for tk in &t {
                let ip: f64 = (0..dirs.len())
                    .map(|p| q[(p, j)] * dirs[p].iter().map(|&(v, x)| tk[pos[&v]] * w[pos[&v]] * x).sum::<f64>())
                    .sum();
                assert!(ip.abs() < 1e-10, "{ip}");
            }
        }
    }

    #[test]
    fn spectraplex_projection() {
        let x = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, -1.0]);
        let p = project_spectraplex(x);
        assert!((p[(0, 0)] - 1.0).abs() < 1e-14 && p[(1, 1)].abs() < 1e-14);
        let p2 = project_spectraplex(p.clone());
        assert!((p2 - p).norm() < 1e-14);
    }

    #[test]
    fn min_norm_of_opposed_gradients_vanishes() {
        // Two eigenvalues pulling in opposite directions: the hull contains 0.
        let g = vec![DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]), DMatrix::zeros(2, 2)];
        let (v, x) = min_norm_subgradient(&g);
        assert!(v[0].abs() < 1e-10, "{v:?}");
        assert!((x.trace() - 1.0).abs() < 1e-12);
        let g = vec![DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 3.0])];
        let (v, _) = min_norm_subgradient(&g);
        assert!((v[0] - 1.0).abs() < 1e-10);
    }
}
