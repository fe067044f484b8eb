//! Thick part by its Dirichlet-to-Neumann matrix, thin part by the reduced
//! one-dimensional energy, matched through the chart means at `p0` and `p1`.
//!
//! Each attachment interval carries a single value of the thick-part function
//! (the strip is stiff across its width) and the compatibility conditions
//! `θ̄(0) = √(εL/t)·u(p0)`, `θ̄(1) = √(εL/t)·r^{1/2}·u(p1)` link it to the profile.
//! For a trial `σ` the interior of the profile is eliminated, leaving the
//! `2×2` Schur complement `K(σ)` on its ends; the interface eigenvalue
//! `λ(σ)` of `S + CᵀK(σ)C` is then driven to `σ` by a bracketed secant iteration on the decreasing
//! residual `λ(σ) − σ`.

use nalgebra::DMatrix;

use crate::asymptotics::cusp_branch;
use crate::geometry::glue::prepare_base;
use crate::geometry::{ConformalMetric, GlueOptions, GlueParams, Mesh, PreparedBase};
use crate::linalg::dense::{column, gen_sym_eig};
use crate::linalg::tridiag::Tridiagonal;
use crate::steklov::{assemble_boundary_mass_on, assemble_stiffness, DtnMatrix, MassKind};

use super::fem::CouplingData;
use super::model::{arc_factor, orient, solve_reduced, BoundaryConditions, ReducedOptions, ReducedState};
use super::Reduced1dError;

#[derive(Clone, Debug)]
pub struct CoupledOptions {
    pub intervals: usize,
    pub max_iter: usize,
    pub tol: f64,
    /// Force the interface values to zero, decoupling the strip.
    pub detach: bool,
    pub glue: GlueOptions,
    pub mass: MassKind,
}

impl Default for CoupledOptions {
    fn default() -> Self {
        Self {
            intervals: 400,
            max_iter: 200,
            tol: 1e-10,
            detach: false,
            glue: GlueOptions::default(),
            mass: MassKind::Consistent,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CoupledSolution {
    pub sigma: f64,
    pub iterations: usize,
    /// `|λ(σ) − σ|/σ` at the last step.
    pub residual: f64,
    pub state: ReducedState,
    pub coupling: CouplingData,
    /// Thick-part values on the boundary vertices of the prepared base.
    pub base_values: Vec<f64>,
    pub boundary: Vec<usize>,
}

/// The thick-part data of the coupled problem, independent of `t`.
#[derive(Clone, Debug)]
pub struct InterfaceSystem {
    pub prepared: PreparedBase,
    pub boundary: Vec<usize>,
    /// Reduced dof of every boundary vertex; the two seams map to `p0`, `p1`.
    pub dof: Vec<usize>,
    pub p0: usize,
    pub p1: usize,
    pub stiffness: DMatrix<f64>,
    pub mass: DMatrix<f64>,
}

impl InterfaceSystem {
    pub fn new(
        base: &Mesh,
        metric: &ConformalMetric,
        params: &GlueParams,
        glue: &GlueOptions,
        kind: MassKind,
    ) -> Result<Self, Reduced1dError> {
        let prepared = prepare_base(base, metric, params, glue)?;
        let mesh = &prepared.mesh;
        let a = assemble_stiffness(mesh, &prepared.metric)?;
        let boundary = mesh.boundary_vertices();
        let dtn = DtnMatrix::from_stiffness(&a, boundary.clone())?;
        let seam_edges = prepared.seam_edge_set();
        let keep = |k: usize| {
            let e = &mesh.boundary_edges[k];
            !seam_edges.contains(&crate::geometry::mesh::edge_key(e.a, e.b))
        };
        let bmass = assemble_boundary_mass_on(mesh, &prepared.metric, kind, &keep)?;
        let bdense = bmass.block_dense(&boundary, &boundary);

        let mut index = vec![usize::MAX; mesh.num_vertices()];
        for (k, &v) in boundary.iter().enumerate() {
            index[v] = k;
        }
        let on_seam = |v: usize, s: usize| prepared.seams[s].vertices.contains(&v);
        let mut dof = vec![0; boundary.len()];
        let mut next = 0;
        for (k, &v) in boundary.iter().enumerate() {
            if !on_seam(v, 0) && !on_seam(v, 1) {
                dof[k] = next;
                next += 1;
            }
        }
        let (p0, p1) = (next, next + 1);
        for (k, &v) in boundary.iter().enumerate() {
            if on_seam(v, 0) {
                dof[k] = p0;
            } else if on_seam(v, 1) {
                dof[k] = p1;
            }
        }
        let m = next + 2;
        let collapse = |full: &DMatrix<f64>| {
            let mut out = DMatrix::zeros(m, m);
            for i in 0..boundary.len() {
                for j in 0..boundary.len() {
                    out[(dof[i], dof[j])] += full[(i, j)];
                }
            }
            out
        };
        Ok(Self { stiffness: collapse(&dtn.matrix), mass: collapse(&bdense), prepared, boundary, dof, p0, p1 })
    }

    pub fn dim(&self) -> usize {
        self.stiffness.nrows()
    }

    /// Lowest eigenvalues of the same discrete system assembled as one linear
    /// pencil in (thick dofs, interior profile values).
    pub fn linear_spectrum(&self, params: &GlueParams, intervals: usize, count: usize) -> Result<Vec<f64>, Reduced1dError> {
        let thin = ThinForms::new(params, intervals);
        let (m, n) = (self.dim(), intervals);
        let dim = m + n - 1;
        let mut a = DMatrix::zeros(dim, dim);
        let mut b = DMatrix::zeros(dim, dim);
        a.view_mut((0, 0), (m, m)).copy_from(&self.stiffness);
        b.view_mut((0, 0), (m, m)).copy_from(&self.mass);
        // Profile node i ↦ (global index, factor).
        let node = |i: usize| -> (usize, f64) {
            if i == 0 {
                (self.p0, thin.a0)
            } else if i == n {
                (self.p1, thin.a1)
            } else {
                (m + i - 1, 1.0)
            }
        };
        for i in 0..=n {
            let (gi, fi) = node(i);
            a[(gi, gi)] += fi * fi * thin.energy.diag[i];
            b[(gi, gi)] += fi * fi * thin.mass[i];
            if i < n {
                let (gj, fj) = node(i + 1);
                a[(gi, gj)] += fi * fj * thin.energy.off[i];
                a[(gj, gi)] += fi * fj * thin.energy.off[i];
            }
        }
        let eig = gen_sym_eig(&a, &b).map_err(|e| Reduced1dError::NoConvergence { detail: e.to_string() })?;
        Ok(eig.values.into_iter().take(count).collect())
    }
}

/// P1 thin energy `t∫(θ/2 + θ′/L)²` and lumped mass `2∫ρθ²` on a uniform grid.
struct ThinForms {
    energy: Tridiagonal,
    mass: Vec<f64>,
    a0: f64,
    a1: f64,
    h: f64,
}

impl ThinForms {
    fn new(params: &GlueParams, n: usize) -> Self {
        let (t, l) = (params.t, params.log_inv_r());
        let h = 1.0 / n as f64;
        let mut diag = vec![0.0; n + 1];
        let mut off = vec![0.0; n];
        let g = 0.5 / 3f64.sqrt();
        for i in 0..n {
            for xi in [0.5 - g, 0.5 + g] {
                let b = [(1.0 - xi) / 2.0 - 1.0 / (l * h), xi / 2.0 + 1.0 / (l * h)];
                let w = 0.5 * h * t;
                diag[i] += w * b[0] * b[0];
                diag[i + 1] += w * b[1] * b[1];
                off[i] += w * b[0] * b[1];
            }
        }
        let mass = (0..=n)
            .map(|i| {
                let w = if i == 0 || i == n { 0.5 * h } else { h };
                2.0 * w * arc_factor(params, i as f64 * h)
            })
            .collect();
        let a0 = (params.eps * l / t).sqrt();
        Self { energy: Tridiagonal { diag, off }, mass, a0, a1: a0 * params.r.sqrt(), h }
    }

    fn shifted(&self, sigma: f64) -> Tridiagonal {
        Tridiagonal {
            diag: self.energy.diag.iter().zip(&self.mass).map(|(d, m)| d - sigma * m).collect(),
            off: self.energy.off.clone(),
        }
    }

    /// Eigenvalues of the interior pencil below `sigma`.
    fn dirichlet_count(&self, sigma: f64) -> usize {
        let n = self.mass.len() - 1;
        let s: Vec<f64> = (1..n).map(|i| 1.0 / self.mass[i].sqrt()).collect();
        let tri = Tridiagonal {
            diag: (1..n).map(|i| self.energy.diag[i] * s[i - 1] * s[i - 1]).collect(),
            off: (1..n - 1).map(|i| self.energy.off[i] * s[i - 1] * s[i]).collect(),
        };
        tri.count_below(sigma)
    }

    /// `K(σ)` on the ends and the interior responses `z`, `w` to unit end values.
    fn end_schur(&self, sigma: f64) -> ([[f64; 2]; 2], Vec<f64>, Vec<f64>) {
        let t = self.shifted(sigma);
        let n = t.dim() - 1;
        let interior = Tridiagonal { diag: t.diag[1..n].to_vec(), off: t.off[1..n - 1].to_vec() };
        let mut rhs0 = vec![0.0; n - 1];
        rhs0[0] = t.off[0];
        let mut rhs1 = vec![0.0; n - 1];
        rhs1[n - 2] = t.off[n - 1];
        let z = thomas(&interior, &rhs0);
        let w = thomas(&interior, &rhs1);
        let k00 = t.diag[0] - t.off[0] * z[0];
        let k01 = -t.off[0] * w[0];
        let k11 = t.diag[n] - t.off[n - 1] * w[n - 2];
        ([[k00, k01], [k01, k11]], z, w)
    }
}

fn thomas(tri: &Tridiagonal, rhs: &[f64]) -> Vec<f64> {
    let n = tri.dim();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut y = rhs.to_vec();
    d[0] = tri.diag[0];
    for i in 1..n {
        c[i - 1] = tri.off[i - 1] / d[i - 1];
        d[i] = tri.diag[i] - c[i - 1] * tri.off[i - 1];
        y[i] -= c[i - 1] * y[i - 1];
    }
    let mut x = vec![0.0; n];
    x[n - 1] = y[n - 1] / d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = (y[i] - tri.off[i] * x[i + 1]) / d[i];
    }
    x
}

struct Interface<'a> {
    sys: &'a InterfaceSystem,
    thin: ThinForms,
}

impl Interface<'_> {
    /// `(λ_j(σ), eigenvector, z, w)` with `j = 1 − n_D(σ)`, or `None` when `σ`
    /// lies above the second interior Dirichlet level.
    fn eval(&self, sigma: f64) -> Result<Option<(f64, Vec<f64>, Vec<f64>, Vec<f64>)>, Reduced1dError> {
        let nd = self.thin.dirichlet_count(sigma);
        if nd > 1 {
            return Ok(None);
        }
        let (k, z, w) = self.thin.end_schur(sigma);
        let (p0, p1) = (self.sys.p0, self.sys.p1);
        let (a0, a1) = (self.thin.a0, self.thin.a1);
        let mut h = self.sys.stiffness.clone();
        h[(p0, p0)] += a0 * a0 * k[0][0];
        h[(p1, p1)] += a1 * a1 * k[1][1];
        h[(p0, p1)] += a0 * a1 * k[0][1];
        h[(p1, p0)] += a0 * a1 * k[0][1];
        let eig = gen_sym_eig(&h, &self.sys.mass).map_err(|e| Reduced1dError::NoConvergence { detail: e.to_string() })?;
        let j = 1 - nd;
        Ok(Some((eig.values[j], column(&eig.vectors, j), z, w)))
    }
}

/// First non-trivial eigenvalue of the coupled problem.
pub fn coupled_solve(
    base: &Mesh,
    metric: &ConformalMetric,
    params: &GlueParams,
    opts: &CoupledOptions,
) -> Result<CoupledSolution, Reduced1dError> {
    if opts.detach {
        return detached(params, opts);
    }
    let sys = InterfaceSystem::new(base, metric, params, &opts.glue, opts.mass)?;
    coupled_solve_prepared(&sys, params, opts)
}

fn detached(params: &GlueParams, opts: &CoupledOptions) -> Result<CoupledSolution, Reduced1dError> {
    let ro = ReducedOptions { intervals: opts.intervals, modes: 1, truncated: false };
    let state = solve_reduced(params, &BoundaryConditions::dirichlet(), &ro)?.remove(0);
    let coupling = CouplingData { mean_p0: 0.0, mean_p1: 0.0, predicted_p0: 0.0, predicted_p1: 0.0 };
    Ok(CoupledSolution {
        sigma: state.sigma,
        iterations: 0,
        residual: 0.0,
        state,
        coupling,
        base_values: Vec::new(),
        boundary: Vec::new(),
    })
}

/// [`coupled_solve`] on a prepared thick part, reusable across `t`.
pub fn coupled_solve_prepared(
    sys: &InterfaceSystem,
    params: &GlueParams,
    opts: &CoupledOptions,
) -> Result<CoupledSolution, Reduced1dError> {
    params.validate()?;
    if opts.detach {
        return detached(params, opts);
    }
    if opts.intervals < 4 {
        return Err(Reduced1dError::InvalidInput { detail: "need at least 4 intervals".into() });
    }
    let it = Interface { sys, thin: ThinForms::new(params, opts.intervals) };
    // f(σ) = λ(σ) − σ decreases strictly, f(0) > 0 and f(λ(0)) ≤ 0.
    let start = it.eval(0.0)?.map(|e| e.0).unwrap_or(f64::INFINITY);
    let (mut lo, mut f_lo) = (0.0, start);
    let mut hi = start.min(cusp_branch(params));
    let mut f_hi = match it.eval(hi)? {
        Some(e) => e.0 - hi,
        None => -hi,
    };
    if f_hi > 0.0 {
        hi = start;
        f_hi = it.eval(hi)?.map_or(-hi, |e| e.0 - hi);
    }
    let mut side = 0i8;
    let mut residual = f64::INFINITY;
    for iter in 1..=opts.max_iter {
        let sigma = if f_lo.is_finite() && f_hi.is_finite() && f_lo > f_hi {
            let s = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
            if s > lo && s < hi { s } else { 0.5 * (lo + hi) }
        } else {
            0.5 * (lo + hi)
        };
        let Some((lambda, x, z, w)) = it.eval(sigma)? else {
            hi = sigma;
            f_hi = -sigma;
            continue;
        };
        let f = lambda - sigma;
        residual = f.abs() / sigma;
        if residual <= opts.tol || (hi - lo) <= opts.tol * sigma {
            return Ok(finish(sys, &it.thin, params, lambda, iter, residual, &x, &z, &w));
        }
        // Illinois weighting keeps both ends moving.
        if f > 0.0 {
            lo = sigma;
            f_lo = f;
            if side == 1 {
                f_hi *= 0.5;
            }
            side = 1;
        } else {
            hi = sigma;
            f_hi = f;
            if side == -1 {
                f_lo *= 0.5;
            }
            side = -1;
        }
    }
    Err(Reduced1dError::InterfaceMismatch { iterations: opts.max_iter, residual })
}

#[allow(clippy::too_many_arguments)]
fn finish(
    sys: &InterfaceSystem,
    thin: &ThinForms,
    params: &GlueParams,
    sigma: f64,
    iterations: usize,
    residual: f64,
    x: &[f64],
    z: &[f64],
    w: &[f64],
) -> CoupledSolution {
    let n = thin.mass.len() - 1;
    let (e0, e1) = (thin.a0 * x[sys.p0], thin.a1 * x[sys.p1]);
    let mut theta = vec![0.0; n + 1];
    theta[0] = e0;
    theta[n] = e1;
    for i in 1..n {
        theta[i] = -(z[i - 1] * e0 + w[i - 1] * e1);
    }
    let xv = crate::linalg::dense::dvec(x);
    let base_mass = xv.dot(&(&sys.mass * &xv));
    let thin_mass: f64 = theta.iter().zip(&thin.mass).map(|(t, m)| m * t * t).sum();
    let total = base_mass + thin_mass;
    let scale = 1.0 / total.sqrt();
    theta.iter_mut().for_each(|t| *t *= scale);
    let grid: Vec<f64> = (0..=n).map(|i| i as f64 * thin.h).collect();
    let sign = orient(&grid, &mut theta);
    let u: Vec<f64> = x.iter().map(|v| v * scale * sign).collect();
    let uv = crate::linalg::dense::dvec(&u);
    let delta = uv.dot(&(&sys.stiffness * &uv)) - sigma * uv.dot(&(&sys.mass * &uv));
    let state = ReducedState::from_profile(params, grid, theta, sigma, Some(thin_mass / total), Some(delta));
    let coupling = CouplingData::from_profile(&state, params, u[sys.p0], u[sys.p1]);
    CoupledSolution {
        sigma,
        iterations,
        residual,
        state,
        coupling,
        base_values: sys.dof.iter().map(|&d| u[d]).collect(),
        boundary: sys.boundary.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_disk_mesh;

    fn disk() -> (Mesh, ConformalMetric) {
        let m = build_disk_mesh(2);
        let n = m.num_vertices();
        (m, ConformalMetric::flat(n))
    }

    #[test]
    fn fixed_point_matches_the_linear_pencil() {
        let (m, g) = disk();
        let p = GlueParams::new(0.1, 0.45, 0.8);
        let opts = CoupledOptions { intervals: 120, ..Default::default() };
        let sys = InterfaceSystem::new(&m, &g, &p, &opts.glue, opts.mass).unwrap();
        let sol = coupled_solve_prepared(&sys, &p, &opts).unwrap();
        let lin = sys.linear_spectrum(&p, 120, 2).unwrap();
        assert!(lin[0].abs() < 1e-4 * lin[1], "{lin:?}");
        assert!((sol.sigma - lin[1]).abs() < 1e-8 * lin[1], "{} {}", sol.sigma, lin[1]);
        assert!(sol.coupling.relative_mismatch() < 1e-12);
        let st = &sol.state;
        assert!(st.c0 > 0.0 && st.c0 < 1.0);
        let ratio = st.theta.last().unwrap() / st.c1;
        assert!(ratio.abs() < 1.0, "{ratio}");
    }

    #[test]
    fn detached_strip_is_the_dirichlet_model() {
        let (m, g) = disk();
        let p = GlueParams::new(0.1, 0.45, 0.8);
        let opts = CoupledOptions { detach: true, ..Default::default() };
        let sol = coupled_solve(&m, &g, &p, &opts).unwrap();
        let want = solve_reduced(&p, &BoundaryConditions::dirichlet(), &ReducedOptions { intervals: 400, modes: 1, truncated: false })
            .unwrap();
        assert_eq!(sol.sigma, want[0].sigma);
        assert_eq!(sol.state.c1, 0.0);
    }
}
