//! Choice of the dilation `t` that puts a prescribed share of the first
//! eigenfunction's boundary mass on the strip.

use crate::geometry::{glue::attach_strip, glue::prepare_base, ConformalMetric, GlueOptions, GlueParams, GluedSurface, Mesh};
use crate::linalg::dense::{column, sym_eig_sorted};
use crate::steklov::{MassKind, SteklovProblem, CLUSTER_TOL};

use super::fem::SplitForms;
use super::Reduced1dError;

#[derive(Clone, Debug)]
pub struct MassChoiceOptions {
    /// Target thin-part mass fraction `ξ`.
    pub xi: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// `[t₀, t₁]`; derived from `σ⋆` when `None`.
    pub bracket: Option<(f64, f64)>,
    pub glue: GlueOptions,
    pub mass: MassKind,
}

impl Default for MassChoiceOptions {
    fn default() -> Self {
        Self { xi: 0.5, tol: 1e-3, max_iter: 60, bracket: None, glue: GlueOptions::default(), mass: MassKind::Consistent }
    }
}

#[derive(Clone, Debug)]
pub struct MassChoice {
    pub t: f64,
    pub mass: f64,
    pub bracket: (f64, f64),
    pub bracket_masses: (f64, f64),
    pub sigma_star: f64,
    pub sigma1: f64,
    pub iterations: usize,
    pub surface: GluedSurface,
}

/// Thin-part mass `M` of the first non-trivial eigenspace: the smallest
/// eigenvalue of the thin-mass Gram matrix of its unit-mass basis (the mass of
/// the eigenfunction itself when the eigenvalue is simple).
pub fn first_cluster_thin_mass(
    problem: &SteklovProblem,
    forms: &SplitForms,
) -> Result<(f64, f64), Reduced1dError> {
    let spec = problem.solve(3, CLUSTER_TOL)?;
    let cluster = spec.cluster_of(1);
    let k = cluster.len();
    let vecs: Vec<Vec<f64>> = cluster.clone().map(|c| column(&spec.eigenfunctions, c)).collect();
    let gram = nalgebra::DMatrix::from_fn(k, k, |i, j| forms.thin_mass.bilinear(&vecs[i], &vecs[j]));
    let (vals, _) = sym_eig_sorted(gram);
    Ok((vals[0], spec.eigenvalues[1]))
}

struct MassCurve {
    surface: GluedSurface,
    problem: SteklovProblem,
    forms: SplitForms,
    kind: MassKind,
}

impl MassCurve {
    fn at(&self, t: f64) -> Result<(f64, f64, GluedSurface), Reduced1dError> {
        let s = self.surface.with_t(t);
        let problem = self.problem.with_metric(&s.mesh, &s.metric)?;
        let forms = self.forms.with_t(&s, self.kind)?;
        let (m, sigma) = first_cluster_thin_mass(&problem, &forms)?;
        Ok((m, sigma, s))
    }
}

/// Bisection in `log t` on `M(t) = ξ`; `M` decreases from near 1 for small
/// `t` to near 0 for large `t`.
pub fn choose_t_for_mass(
    base: &Mesh,
    metric: &ConformalMetric,
    params: &GlueParams,
    opts: &MassChoiceOptions,
) -> Result<MassChoice, Reduced1dError> {
    const ETA: f64 = 0.05;
    if !(opts.xi > 0.0 && opts.xi < 1.0 - ETA) {
        return Err(Reduced1dError::InvalidInput { detail: format!("ξ = {} must lie in (0, {})", opts.xi, 1.0 - ETA) });
    }
    let prepared = prepare_base(base, metric, params, &opts.glue)?;
    let star = SteklovProblem::new(&prepared.mesh, &prepared.metric, opts.mass)?.solve(1, CLUSTER_TOL)?;
    let sigma_star = star.eigenvalues[1];
    let surface = attach_strip(prepared, params, &opts.glue)?;
    let problem = SteklovProblem::new(&surface.mesh, &surface.metric, opts.mass)?;
    let forms = SplitForms::new(&surface, opts.mass)?;
    let curve = MassCurve { surface, problem, forms, kind: opts.mass };

    let (t0, t1) = opts.bracket.unwrap_or_else(|| {
        let l = params.log_inv_r();
        let t_res = sigma_star / (0.125 + std::f64::consts::PI.powi(2) / (2.0 * l * l));
        (0.25 * t_res, (16.0 * sigma_star).max(4.0 * t_res))
    });
    if !(t0 > 0.0 && t1 > t0) {
        return Err(Reduced1dError::InvalidInput { detail: format!("bad bracket [{t0}, {t1}]") });
    }
    let (m0, _, _) = curve.at(t0)?;
    let (m1, _, _) = curve.at(t1)?;
    if m0 < opts.xi || m1 > opts.xi {
        return Err(Reduced1dError::BracketFailure {
            detail: format!("M does not straddle ξ = {} on [{t0}, {t1}]", opts.xi),
            lo_mass: m0,
            hi_mass: m1,
        });
    }
    let (mut lo, mut hi) = (t0.ln(), t1.ln());
    for iter in 1..=opts.max_iter {
        let mid = 0.5 * (lo + hi);
        let (m, sigma1, surface) = curve.at(mid.exp())?;
        if (m - opts.xi).abs() <= opts.tol {
            return Ok(MassChoice {
                t: mid.exp(),
                mass: m,
                bracket: (t0, t1),
                bracket_masses: (m0, m1),
                sigma_star,
                sigma1,
                iterations: iter,
                surface,
            });
        }
        if m > opts.xi {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Reduced1dError::NoConvergence { detail: format!("M(t) = ξ not reached in {} bisection steps", opts.max_iter) })
}
