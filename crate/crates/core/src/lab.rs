//! Standard experiments, one point at a time so that callers can run grids in
//! parallel and keep rows in grid order.

use std::f64::consts::PI;

use rand::SeedableRng;

use crate::asymptotics::{
    expansion_sigma, upper_bound_first, upper_bound_kplus1, AsymptoticsError, BoundReport, Expansion, ExpansionInput,
};
use crate::geometry::glue::{attach_strip, prepare_base};
use crate::geometry::{build_cusp_mesh, ConformalMetric, GeometryError, GlueOptions, GlueParams, Mesh};
use crate::reduced1d::{
    analyze_glued, choose_t_for_mass, combined_test_function, coupled_solve, gram_from_fem, select_second_mode,
    solve_reduced, BoundaryConditions, CombinedBound, CoupledOptions, MassChoiceOptions, ReducedOptions,
    Reduced1dError, SplitForms,
};
use crate::shapeopt::{
    extract_immersion, minimality_residuals, mobius_fit, optimize_density, DensityParam, MinimalityReport,
    OptimizeOptions, Parametrization, ShapeOptError, Termination,
};
use crate::steklov::{steklov_spectrum, MassKind, SteklovError, SteklovProblem, CLUSTER_TOL};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LabError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Steklov(#[from] SteklovError),
    #[error(transparent)]
    Asymptotics(#[from] AsymptoticsError),
    #[error(transparent)]
    Reduced1d(#[from] Reduced1dError),
    #[error(transparent)]
    ShapeOpt(#[from] ShapeOptError),
}

/// `2(σ₁ − 1/8) ln²r` on the strip alone at `t = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct CuspLawRow {
    pub eps: f64,
    pub alpha: f64,
    pub r: f64,
    pub sigma1: f64,
    pub quantity: f64,
    /// `(quantity − π²)/π²`.
    pub rel_error: f64,
}

pub fn cusp_law_point(eps: f64, alpha: f64, layers: usize) -> Result<CuspLawRow, LabError> {
    let p = GlueParams::new(eps, alpha, 1.0);
    let mesh = build_cusp_mesh(&p, layers)?;
    let spec = steklov_spectrum(&mesh, &ConformalMetric::flat(mesh.num_vertices()), 2)?;
    let l = p.log_inv_r();
    let quantity = 2.0 * (spec.eigenvalues[1] - 0.125) * l * l;
    Ok(CuspLawRow { eps, alpha, r: p.r, sigma1: spec.eigenvalues[1], quantity, rel_error: quantity / (PI * PI) - 1.0 })
}

/// For every α, `|quantity − π²|` decreases strictly as ε decreases.
pub fn cusp_law_monotone(rows: &[CuspLawRow]) -> bool {
    let mut alphas: Vec<f64> = rows.iter().map(|r| r.alpha).collect();
    alphas.sort_by(f64::total_cmp);
    alphas.dedup();
    alphas.iter().all(|&a| {
        let mut line: Vec<&CuspLawRow> = rows.iter().filter(|r| r.alpha == a).collect();
        line.sort_by(|x, y| y.eps.total_cmp(&x.eps));
        line.windows(2).all(|w| w[1].rel_error.abs() < w[0].rel_error.abs())
    })
}

/// Base data shared by every glued experiment.
#[derive(Clone, Debug)]
pub struct GluedBase {
    pub mesh: Mesh,
    pub metric: ConformalMetric,
    pub glue: GlueOptions,
    pub mass: MassKind,
}

impl GluedBase {
    pub fn new(mesh: Mesh, metric: ConformalMetric) -> Self {
        Self { mesh, metric, glue: GlueOptions::default(), mass: MassKind::Consistent }
    }

    /// Multiplicity `K` of `σ⋆` on the unrefined base; local refinement at the
    /// attachment points splits the discrete cluster.
    pub fn multiplicity(&self) -> Result<usize, LabError> {
        let p = SteklovProblem::new(&self.mesh, &self.metric, self.mass)?;
        Ok(p.solve(4, CLUSTER_TOL)?.cluster_of(1).len())
    }
}

/// FEM eigenvalues of the glued surface against both upper bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundRow {
    pub eps: f64,
    pub alpha: f64,
    pub t: f64,
    pub sigma_star: f64,
    pub k: usize,
    pub sigma1: f64,
    pub sigma_k1: f64,
    pub first: BoundReport,
    pub kplus1: BoundReport,
    pub slack: f64,
    /// `(σ₁ − bound)/error_scale`; the check passes when this is at most `slack`.
    pub excess_first: f64,
    pub excess_kplus1: f64,
}

impl BoundRow {
    pub fn holds(&self) -> bool {
        self.excess_first <= self.slack && self.excess_kplus1 <= self.slack
    }
}

/// One point at `t = t_factor·8σ⋆`; the `t` of `params` is ignored.
pub fn bound_point(base: &GluedBase, params: &GlueParams, t_factor: f64, slack: f64) -> Result<BoundRow, LabError> {
    let k = base.multiplicity()?;
    let p = params;
    let prepared = prepare_base(&base.mesh, &base.metric, p, &base.glue)?;
    let star = SteklovProblem::new(&prepared.mesh, &prepared.metric, base.mass)?.solve(1, CLUSTER_TOL)?;
    let sigma_star = star.eigenvalues[1];
    let p = p.with_t(8.0 * sigma_star * t_factor);
    let glued = attach_strip(prepared, &p, &base.glue)?;
    let spec = SteklovProblem::new(&glued.mesh, &glued.metric, base.mass)?.solve(k + 1, CLUSTER_TOL)?;
    let (first, kplus1) = (upper_bound_first(&p, sigma_star), upper_bound_kplus1(&p, sigma_star));
    let (sigma1, sigma_k1) = (spec.eigenvalues[1], spec.eigenvalues[k + 1]);
    Ok(BoundRow {
        eps: p.eps,
        alpha: p.alpha_effective(),
        t: p.t,
        sigma_star,
        k,
        sigma1,
        sigma_k1,
        first,
        kplus1,
        slack,
        excess_first: (sigma1 - first.bound) / first.error_scale,
        excess_kplus1: (sigma_k1 - kplus1.bound) / kplus1.error_scale,
    })
}

/// Closed-form branches and expansion against the FEM spectrum of one glued
/// surface.
#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticsRow {
    pub eps: f64,
    pub alpha: f64,
    pub t: f64,
    pub r: f64,
    pub sigma_star: f64,
    pub first: BoundReport,
    pub kplus1: BoundReport,
    pub expansion: Expansion,
    pub sigma1: f64,
    pub sigma_k1: f64,
    pub c0: f64,
    pub c1: f64,
}

impl AsymptoticsRow {
    pub fn residual_first(&self) -> f64 {
        self.sigma1 - self.first.bound
    }

    pub fn residual_kplus1(&self) -> f64 {
        self.sigma_k1 - self.kplus1.bound
    }

    pub fn residual_expansion(&self) -> f64 {
        self.sigma1 - self.expansion.sigma
    }
}

/// `t` is absolute, or a multiple of `8σ⋆` when `t_star_units`.
pub fn asymptotics_point(
    base: &GluedBase,
    params: &GlueParams,
    t: f64,
    t_star_units: bool,
) -> Result<AsymptoticsRow, LabError> {
    let k = base.multiplicity()?;
    let p = params;
    let prepared = prepare_base(&base.mesh, &base.metric, p, &base.glue)?;
    let star = SteklovProblem::new(&prepared.mesh, &prepared.metric, base.mass)?.solve(1, CLUSTER_TOL)?;
    let sigma_star = star.eigenvalues[1];
    let p = p.with_t(if t_star_units { 8.0 * sigma_star * t } else { t });
    let glued = attach_strip(prepared, &p, &base.glue)?;
    let problem = SteklovProblem::new(&glued.mesh, &glued.metric, base.mass)?;
    let modes = analyze_glued(&glued, &problem, k + 1, SplitForms::new(&glued, base.mass)?)?;
    let st = &modes.states[0];
    let expansion = expansion_sigma(&ExpansionInput::new(p.clone(), st.c0.min(1.0), st.c1))?;
    Ok(AsymptoticsRow {
        eps: p.eps,
        alpha: p.alpha_effective(),
        t: p.t,
        r: p.r,
        sigma_star,
        first: upper_bound_first(&p, sigma_star),
        kplus1: upper_bound_kplus1(&p, sigma_star),
        expansion,
        sigma1: modes.spectrum.eigenvalues[1],
        sigma_k1: modes.spectrum.eigenvalues[k + 1],
        c0: st.c0,
        c1: st.c1,
    })
}

/// Mass-balanced glued surface: reduced, coupled and FEM eigenvalues and the
/// combined test function.
#[derive(Clone, Debug, PartialEq)]
pub struct ReduceRow {
    pub eps: f64,
    pub alpha: f64,
    pub xi: f64,
    pub t: f64,
    pub mass: f64,
    pub sigma_reduced: f64,
    pub sigma_coupled: f64,
    pub sigma_fem: f64,
    pub c0: f64,
    pub c1: f64,
    /// Second mode used by the combined test function, if any qualifies.
    pub second: Option<usize>,
    pub d1: Option<f64>,
    pub combined: Option<CombinedBound>,
}

impl ReduceRow {
    pub fn coupled_rel_error(&self) -> f64 {
        (self.sigma_coupled - self.sigma_fem) / self.sigma_fem
    }
}

#[derive(Clone, Debug)]
pub struct ReduceOptions {
    pub xi: f64,
    pub intervals: usize,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        Self { xi: 0.5, intervals: 400 }
    }
}

/// The `t` of `params` is replaced by the mass-balancing choice.
pub fn reduce_point(base: &GluedBase, params: &GlueParams, opts: &ReduceOptions) -> Result<ReduceRow, LabError> {
    let k = base.multiplicity()?;
    let p = params;
    let mopts = MassChoiceOptions { xi: opts.xi, glue: base.glue.clone(), mass: base.mass, ..Default::default() };
    let choice = choose_t_for_mass(&base.mesh, &base.metric, p, &mopts)?;
    let p = p.with_t(choice.t);
    let glued = &choice.surface;
    let problem = SteklovProblem::new(&glued.mesh, &glued.metric, base.mass)?;
    let forms = SplitForms::new(glued, base.mass)?;
    let modes = analyze_glued(glued, &problem, k + 1, forms)?;
    let first = &modes.states[0];

    let copts = CoupledOptions { intervals: opts.intervals, glue: base.glue.clone(), mass: base.mass, ..Default::default() };
    let coupled = coupled_solve(&base.mesh, &base.metric, &p, &copts)?;
    let ropts = ReducedOptions { intervals: opts.intervals, modes: 1, truncated: false };
    let reduced = solve_reduced(&p, &BoundaryConditions::dirichlet(), &ropts)?.remove(0);

    let second = select_second_mode(&modes.thin_mass, k);
    let (d1, combined) = match second {
        Some(l) => {
            let st = &modes.states[l - 1];
            let bound = match combined_test_function(first, st, &gram_from_fem(&modes, l)) {
                Ok(b) => Some(b),
                Err(Reduced1dError::DegenerateC1 { .. }) => None,
                Err(e) => return Err(e.into()),
            };
            (Some(st.c1), bound)
        }
        None => (None, None),
    };
    Ok(ReduceRow {
        eps: p.eps,
        alpha: p.alpha_effective(),
        xi: opts.xi,
        t: choice.t,
        mass: choice.mass,
        sigma_reduced: reduced.sigma,
        sigma_coupled: coupled.sigma,
        sigma_fem: modes.spectrum.eigenvalues[1],
        c0: first.c0,
        c1: first.c1,
        second,
        d1,
        combined,
    })
}

/// Terminal state of one density ascent on a disk.
#[derive(Clone, Debug, PartialEq)]
pub struct WeinstockRow {
    pub seed: u64,
    pub initial: f64,
    pub sigma1_l: f64,
    /// `σ₁L/2π − 1`.
    pub rel_error: f64,
    pub termination: Termination,
    pub iterations: usize,
    /// Sup-norm of the terminal density after mean removal.
    pub raw_flatness: f64,
    /// The same after removing the best boost pullback.
    pub gauge_flatness: f64,
    pub n: usize,
    pub residuals: MinimalityReport,
}

pub fn weinstock_point(
    mesh: &Mesh,
    seed: u64,
    amplitude: f64,
    param: Parametrization,
    opts: &OptimizeOptions,
) -> Result<WeinstockRow, LabError> {
    let base = ConformalMetric::flat(mesh.num_vertices());
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let init = DensityParam::random(mesh, param, amplitude, &mut rng)?;
    let res = optimize_density(mesh, &base, init, opts)?;
    let gauge_flatness = mobius_fit(mesh, &res.density).map_or(f64::NAN, |f| f.residual);
    let imm = extract_immersion(&res.spectrum, &res.problem, opts.cluster_tol);
    let residuals = minimality_residuals(&imm, &res.problem);
    Ok(WeinstockRow {
        seed,
        initial: res.history[0].sigma1_l,
        sigma1_l: res.sigma1_l,
        rel_error: res.sigma1_l / (2.0 * PI) - 1.0,
        termination: res.termination,
        iterations: res.history.len() - 1,
        raw_flatness: res.density.flatness(),
        gauge_flatness,
        n: imm.n,
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_disk_mesh;

    #[test]
    fn cusp_law_monotonicity_reads_each_alpha_line() {
        let row = |eps: f64, alpha: f64, rel_error: f64| CuspLawRow { eps, alpha, r: 0.0, sigma1: 0.0, quantity: 0.0, rel_error };
        let good = [row(0.2, 0.4, -0.1), row(0.1, 0.4, -0.05), row(0.2, 0.45, 0.2), row(0.1, 0.45, 0.01)];
        assert!(cusp_law_monotone(&good));
        let bad = [row(0.2, 0.4, -0.1), row(0.1, 0.4, 0.12)];
        assert!(!cusp_law_monotone(&bad));
    }

    #[test]
    fn disk_multiplicity_is_two() {
        let base = GluedBase::new(build_disk_mesh(2), ConformalMetric::flat(build_disk_mesh(2).num_vertices()));
        assert_eq!(base.multiplicity().unwrap(), 2);
    }
}
