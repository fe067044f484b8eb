//! The reduced thin-part eigenproblem
//! `−w″ = ln²r ((2σ/t − 1/4) + (2σ/t)(ρ − 1)) w`, `ρ = √(1 + ε²r^{2v})`,
//! discretized by lumped P1 elements on a uniform grid of `[0, 1]`.

use std::f64::consts::PI;

use crate::geometry::GlueParams;
use crate::linalg::tridiag::Tridiagonal;

use super::Reduced1dError;

/// Condition at one end of `[0, 1]`; Robin means `α w + β w′ = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EndCondition {
    Dirichlet,
    Robin { alpha: f64, beta: f64 },
}

impl EndCondition {
    /// Zero physical flux `φ_y = 0`, i.e. `θ/2 + θ_v/ln(1/r) = 0`.
    pub fn free(params: &GlueParams) -> Self {
        EndCondition::Robin { alpha: 0.5, beta: 1.0 / params.log_inv_r() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryConditions {
    /// At `v = 0`, the `p0` end.
    pub left: EndCondition,
    /// At `v = 1`, the `p1` end.
    pub right: EndCondition,
}

impl BoundaryConditions {
    pub fn dirichlet() -> Self {
        Self { left: EndCondition::Dirichlet, right: EndCondition::Dirichlet }
    }

    /// Robin coupling at `p0`, Dirichlet at `p1`.
    pub fn robin_dirichlet(alpha: f64, beta: f64) -> Self {
        Self { left: EndCondition::Robin { alpha, beta }, right: EndCondition::Dirichlet }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReducedOptions {
    pub intervals: usize,
    pub modes: usize,
    /// Drop the `√(1 + ε²r^{2v}) − 1` correction.
    pub truncated: bool,
}

impl Default for ReducedOptions {
    fn default() -> Self {
        Self { intervals: 1024, modes: 3, truncated: false }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReducedDiagnostics {
    /// `∫_Σ |∇u|² − σN` when a thick part is present.
    pub delta_eps: Option<f64>,
    /// `b_ε = (ε/π) φ̄_y(1)`.
    pub b_eps: f64,
    /// Scale `ε/ln(1/r)` of the dropped horizontal deviation `‖μ/√M‖`.
    pub mu_bound: f64,
}

/// Horizontal-mean profile `θ̄` of a thin-part eigenfunction.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedState {
    pub grid: Vec<f64>,
    pub theta: Vec<f64>,
    pub theta_v: Vec<f64>,
    pub sigma: f64,
    /// `√M`, `M` the thin boundary mass.
    pub c0: f64,
    /// `θ̄(0)`.
    pub c1: f64,
    pub diagnostics: ReducedDiagnostics,
}

/// `ρ(v) = √(1 + ε²r^{2v})`.
pub fn arc_factor(params: &GlueParams, v: f64) -> f64 {
    (1.0 + params.eps.powi(2) * (-2.0 * v * params.log_inv_r()).exp()).sqrt()
}

/// Second-order differences on a (possibly non-uniform) grid.
pub fn grid_derivative(grid: &[f64], f: &[f64]) -> Vec<f64> {
    let n = grid.len();
    if n < 3 {
        let d = if n == 2 { (f[1] - f[0]) / (grid[1] - grid[0]) } else { 0.0 };
        return vec![d; n];
    }
    let three = |i: usize, at: usize| -> f64 {
        let (x0, x1, x2) = (grid[i], grid[i + 1], grid[i + 2]);
        let x = grid[at];
        let l0 = ((x - x1) + (x - x2)) / ((x0 - x1) * (x0 - x2));
        let l1 = ((x - x0) + (x - x2)) / ((x1 - x0) * (x1 - x2));
        let l2 = ((x - x0) + (x - x1)) / ((x2 - x0) * (x2 - x1));
        l0 * f[i] + l1 * f[i + 1] + l2 * f[i + 2]
    };
    (0..n)
        .map(|k| match k {
            0 => three(0, 0),
            k if k + 1 == n => three(n - 3, k),
            k => three(k - 1, k),
        })
        .collect()
}

/// Trapezoid rule on a grid.
pub fn trapezoid(grid: &[f64], f: &[f64]) -> f64 {
    grid.windows(2).zip(f.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])).sum()
}

impl ReducedState {
    /// Builds the state from a profile on `grid`; `thin_mass` is `M` (so
    /// `c₀ = √M`), computed from the profile when `None`.
    pub fn from_profile(
        params: &GlueParams,
        grid: Vec<f64>,
        theta: Vec<f64>,
        sigma: f64,
        thin_mass: Option<f64>,
        delta_eps: Option<f64>,
    ) -> Self {
        let l = params.log_inv_r();
        let theta_v = grid_derivative(&grid, &theta);
        let mass = thin_mass.unwrap_or_else(|| {
            let w: Vec<f64> = grid.iter().zip(&theta).map(|(&v, &th)| 2.0 * arc_factor(params, v) * th * th).collect();
            trapezoid(&grid, &w)
        });
        let c1 = theta[0];
        let b_eps = -(params.eps / PI) * (params.t / (params.eps * l)).sqrt() * (c1 / 2.0 + theta_v[0] / l);
        Self {
            grid,
            theta,
            theta_v,
            sigma,
            c0: mass.max(0.0).sqrt(),
            c1,
            diagnostics: ReducedDiagnostics { delta_eps, b_eps, mu_bound: params.eps / l },
        }
    }

    /// `2∫ θ̄² dv` by the trapezoid rule.
    pub fn profile_mass(&self) -> f64 {
        let sq: Vec<f64> = self.theta.iter().map(|t| 2.0 * t * t).collect();
        trapezoid(&self.grid, &sq)
    }
}

/// Orients a profile so that `∫ θ̄ sin πv ≥ 0`, falling back to the sign of its
/// largest entry when that projection vanishes.
pub fn orient(grid: &[f64], theta: &mut [f64]) -> f64 {
    let proj: Vec<f64> = grid.iter().zip(theta.iter()).map(|(&v, &t)| t * (PI * v).sin()).collect();
    let p = trapezoid(grid, &proj);
    let peak = theta.iter().copied().fold(0.0, |a: f64, b| if b.abs() > a.abs() { b } else { a });
    let s = if p.abs() > 1e-8 * theta.iter().map(|t| t.abs()).fold(0.0, f64::max) { p.signum() } else { peak.signum() };
    let s = if s == 0.0 { 1.0 } else { s };
    theta.iter_mut().for_each(|t| *t *= s);
    s
}

/// Lowest eigenpairs of the reduced operator; profiles are normalized by
/// `2∫ρθ̄² = 1` (the whole mass on the thin part).
pub fn solve_reduced(
    params: &GlueParams,
    bc: &BoundaryConditions,
    opts: &ReducedOptions,
) -> Result<Vec<ReducedState>, Reduced1dError> {
    params.validate()?;
    let n = opts.intervals;
    if n < 4 || opts.modes == 0 {
        return Err(Reduced1dError::InvalidInput { detail: "need at least 4 intervals and one mode".into() });
    }
    let l = params.log_inv_r();
    let h = 1.0 / n as f64;
    let grid: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    let rho: Vec<f64> = grid.iter().map(|&v| if opts.truncated { 1.0 } else { arc_factor(params, v) }).collect();

    // K w = Λ M w with K = (1/h) tridiag(−1, 2, −1) + (L²/4) M₀, M = diag(h ρ), halved at the ends.
    let mut diag = vec![0.0; n + 1];
    let mut off = vec![-1.0 / h; n];
    let mut mass = vec![0.0; n + 1];
    for i in 0..=n {
        let w = if i == 0 || i == n { 0.5 * h } else { h };
        diag[i] = if i == 0 || i == n { 1.0 / h } else { 2.0 / h } + 0.25 * l * l * w;
        mass[i] = w * rho[i];
    }
    let robin = |c: EndCondition| match c {
        EndCondition::Robin { alpha, beta } if beta != 0.0 => Some(alpha / beta),
        _ => None,
    };
    let left_dirichlet = robin(bc.left).is_none();
    let right_dirichlet = robin(bc.right).is_none();
    if let Some(q) = robin(bc.left) {
        diag[0] -= q;
    }
    if let Some(q) = robin(bc.right) {
        diag[n] += q;
    }
    let lo = usize::from(left_dirichlet);
    let hi = if right_dirichlet { n - 1 } else { n };
    let free: Vec<usize> = (lo..=hi).collect();
    let scale: Vec<f64> = free.iter().map(|&i| 1.0 / mass[i].sqrt()).collect();
    let tri = Tridiagonal {
        diag: free.iter().zip(&scale).map(|(&i, s)| diag[i] * s * s).collect(),
        off: (0..free.len() - 1).map(|k| off[free[k]] * scale[k] * scale[k + 1]).collect(),
    };
    off.clear();

    let mut out = Vec::with_capacity(opts.modes);
    for k in 0..opts.modes.min(free.len()) {
        let lambda = tri
            .eigenvalue(k)
            .map_err(|e| Reduced1dError::NoConvergence { detail: format!("reduced eigenvalue {k}: {e}") })?;
        let z = tri.eigenvector(lambda);
        let mut theta = vec![0.0; n + 1];
        for (j, &i) in free.iter().enumerate() {
            theta[i] = z[j] * scale[j];
        }
        let norm: f64 = theta.iter().zip(&mass).map(|(t, m)| 2.0 * m * t * t).sum::<f64>().sqrt();
        theta.iter_mut().for_each(|t| *t /= norm);
        orient(&grid, &mut theta);
        let sigma = params.t * lambda / (2.0 * l * l);
        out.push(ReducedState::from_profile(params, grid.clone(), theta, sigma, Some(1.0), None));
    }
    Ok(out)
}

/// Exact eigenvalue of the truncated discrete Dirichlet problem on `n` intervals.
pub fn discrete_dirichlet_sigma(params: &GlueParams, n: usize, mode: usize) -> f64 {
    let l = params.log_inv_r();
    let h = 1.0 / n as f64;
    let k = (mode + 1) as f64;
    let lambda = 0.25 * l * l + 4.0 / (h * h) * (0.5 * k * PI * h).sin().powi(2);
    params.t * lambda / (2.0 * l * l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncated_dirichlet_matches_the_discrete_symbol() {
        let p = GlueParams::new(0.1, 0.45, 1.3);
        let opts = ReducedOptions { intervals: 200, modes: 2, truncated: true };
        let s = solve_reduced(&p, &BoundaryConditions::dirichlet(), &opts).unwrap();
        for (k, st) in s.iter().enumerate() {
            let want = discrete_dirichlet_sigma(&p, 200, k);
            assert!((st.sigma - want).abs() < 1e-12 * want, "{k} {} {want}", st.sigma);
        }
        assert_eq!(s[0].theta[0], 0.0);
        assert!(s[0].theta[100] > 0.0);
    }

    #[test]
    fn free_end_raises_no_flux() {
        let p = GlueParams::new(0.1, 0.45, 1.0);
        let bc = BoundaryConditions { left: EndCondition::free(&p), right: EndCondition::Dirichlet };
        let s = solve_reduced(&p, &bc, &ReducedOptions::default()).unwrap();
        let d = solve_reduced(&p, &BoundaryConditions::dirichlet(), &ReducedOptions::default()).unwrap();
        assert!(s[0].sigma < d[0].sigma);
        let l = p.log_inv_r();
        let flux = s[0].theta[0] / 2.0 + s[0].theta_v[0] / l;
        assert!(flux.abs() < 1e-2 * s[0].theta_v[0].abs(), "{flux}");
        assert!(s[0].diagnostics.b_eps.abs() < 1e-2);
    }

    #[test]
    fn dirichlet_error_is_second_order() {
        let p = GlueParams::new(0.1, 0.4, 1.0);
        let exact = crate::asymptotics::cusp_branch(&p);
        let err = |n: usize| {
            let o = ReducedOptions { intervals: n, modes: 1, truncated: true };
            (solve_reduced(&p, &BoundaryConditions::dirichlet(), &o).unwrap()[0].sigma - exact).abs()
        };
        let slope = (err(64) / err(128)).log2();
        assert!((slope - 2.0).abs() < 0.05, "{slope}");
    }

    #[test]
    fn modes_are_mass_orthogonal() {
        let p = GlueParams::new(0.2, 0.35, 1.0);
        let o = ReducedOptions { intervals: 300, modes: 3, truncated: false };
        let s = solve_reduced(&p, &BoundaryConditions::robin_dirichlet(0.5, 1.0 / p.log_inv_r()), &o).unwrap();
        let h = 1.0 / 300.0;
        for a in 0..3 {
            for b in 0..3 {
                let dot: f64 = (0..=300)
                    .map(|i| {
                        let w = if i == 0 || i == 300 { 0.5 * h } else { h };
                        2.0 * w * arc_factor(&p, i as f64 * h) * s[a].theta[i] * s[b].theta[i]
                    })
                    .sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-10, "{a} {b} {dot}");
            }
        }
        assert!(s[0].sigma < s[1].sigma && s[1].sigma < s[2].sigma);
    }

    #[test]
    fn derivative_is_second_order_on_uneven_grids() {
        let grid: Vec<f64> = (0..=40).map(|i| (i as f64 / 40.0).powi(2)).collect();
        let f: Vec<f64> = grid.iter().map(|x| x * x).collect();
        let d = grid_derivative(&grid, &f);
        for (x, g) in grid.iter().zip(d) {
            assert!((g - 2.0 * x).abs() < 1e-12);
        }
    }
}
