//! Reduced quantities read off finite-element eigenfunctions of a glued surface.

use crate::asymptotics::phi_scale;
use crate::geometry::GluedSurface;
use crate::linalg::dense::column;
use crate::linalg::SymMatrix;
use crate::steklov::{assemble_boundary_mass_on, assemble_stiffness_on, MassKind, SteklovProblem, SteklovSpectrum};

use super::model::{orient, trapezoid, ReducedState};
use super::Reduced1dError;

/// Stiffness and boundary mass split between the strip and the base.
#[derive(Clone, Debug)]
pub struct SplitForms {
    pub thin_stiffness: SymMatrix,
    pub thin_mass: SymMatrix,
    pub base_stiffness: SymMatrix,
    pub base_mass: SymMatrix,
}

impl SplitForms {
    pub fn new(glued: &GluedSurface, kind: MassKind) -> Result<Self, Reduced1dError> {
        let (mesh, metric) = (&glued.mesh, &glued.metric);
        let cusp = |t: usize| mesh.triangle_charts[t] == glued.cusp_chart;
        let side = |k: usize| GluedSurface::is_side_edge(&mesh.boundary_edges[k].tag);
        Ok(Self {
            thin_stiffness: assemble_stiffness_on(mesh, metric, &cusp)?,
            thin_mass: assemble_boundary_mass_on(mesh, metric, kind, &side)?,
            base_stiffness: assemble_stiffness_on(mesh, metric, &|t| !cusp(t))?,
            base_mass: assemble_boundary_mass_on(mesh, metric, kind, &|k| !side(k))?,
        })
    }

    /// The same split for dilation `t`; only the strip's mass depends on it.
    pub fn with_t(&self, glued: &GluedSurface, kind: MassKind) -> Result<Self, Reduced1dError> {
        let mesh = &glued.mesh;
        let side = |k: usize| GluedSurface::is_side_edge(&mesh.boundary_edges[k].tag);
        Ok(Self { thin_mass: assemble_boundary_mass_on(mesh, &glued.metric, kind, &side)?, ..self.clone() })
    }
}

/// Row means `φ̄(v)` of a nodal function over the strip, `½∫ u ds` per row.
fn row_means(glued: &GluedSurface, u: &[f64]) -> Vec<f64> {
    glued
        .rows
        .iter()
        .zip(&glued.rows_s)
        .map(|(row, s)| {
            let vals: Vec<f64> = row.iter().map(|&i| u[i]).collect();
            0.5 * trapezoid(s, &vals)
        })
        .collect()
}

/// Reduced state of a glued eigenfunction `u` with eigenvalue `sigma`,
/// normalized to unit total boundary mass.
pub fn reduced_state_from_fem(glued: &GluedSurface, forms: &SplitForms, u: &[f64], sigma: f64) -> ReducedState {
    let p = &glued.params;
    let l = p.log_inv_r();
    let total = forms.thin_mass.quad_form(u) + forms.base_mass.quad_form(u);
    let scale = 1.0 / total.sqrt();
    let u: Vec<f64> = u.iter().map(|x| x * scale).collect();
    let theta: Vec<f64> = row_means(glued, &u)
        .into_iter()
        .zip(&glued.rows_v)
        .map(|(m, &v)| m / phi_scale((-v * l).exp(), p))
        .collect();
    let delta = forms.base_stiffness.quad_form(&u) - sigma * forms.base_mass.quad_form(&u);
    ReducedState::from_profile(p, glued.rows_v.clone(), theta, sigma, Some(forms.thin_mass.quad_form(&u)), Some(delta))
}

/// Chart-interval means of the thick part at both attachment points and the
/// values the compatibility conditions predict from `θ̄`.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingData {
    pub mean_p0: f64,
    pub mean_p1: f64,
    /// `θ̄(0)·√t/(√ε √ln(1/r))`.
    pub predicted_p0: f64,
    /// `θ̄(1)·√t r^{−1/2}/(√ε √ln(1/r))`.
    pub predicted_p1: f64,
}

impl CouplingData {
    pub fn from_profile(state: &ReducedState, params: &crate::geometry::GlueParams, mean_p0: f64, mean_p1: f64) -> Self {
        let k = (params.t / (params.eps * params.log_inv_r())).sqrt();
        let last = *state.theta.last().expect("profile");
        Self { mean_p0, mean_p1, predicted_p0: k * state.c1, predicted_p1: k * last / params.r.sqrt() }
    }

    /// Largest mismatch relative to the size of the thick-part mean at `p0`.
    pub fn relative_mismatch(&self) -> f64 {
        let s = self.mean_p0.abs().max(f64::MIN_POSITIVE);
        ((self.mean_p0 - self.predicted_p0).abs()).max((self.mean_p1 - self.predicted_p1).abs()) / s
    }
}

/// Coupling data of a glued eigenfunction; `u` is normalized as in `state`.
pub fn coupling_from_fem(glued: &GluedSurface, state: &ReducedState, u_normalized: &[f64]) -> CouplingData {
    let mean = |k: usize| -> f64 {
        let seam = &glued.base.seams[k];
        seam.vertices.iter().zip(seam.mean_weights()).map(|(&v, w)| w * u_normalized[v]).sum()
    };
    CouplingData::from_profile(state, &glued.params, mean(0), mean(1))
}

/// Spectrum of a glued surface with the reduced state of every non-constant mode.
#[derive(Clone, Debug)]
pub struct GluedModes {
    pub spectrum: SteklovSpectrum,
    /// `states[k]` belongs to eigenvalue `k + 1`.
    pub states: Vec<ReducedState>,
    pub coupling: Vec<CouplingData>,
    /// Thin-part mass of every eigenfunction (unit total mass).
    pub thin_mass: Vec<f64>,
    pub forms: SplitForms,
}

impl GluedModes {
    /// Unit-mass eigenfunction `k`, oriented like its reduced state.
    pub fn mode(&self, k: usize) -> Vec<f64> {
        self.spectrum.eigenfunction(k)
    }
}

/// Solves the glued problem for `count` non-constant modes and orients each
/// eigenfunction so that its profile has `∫ θ̄ sin πv ≥ 0`.
pub fn analyze_glued(
    glued: &GluedSurface,
    problem: &SteklovProblem,
    count: usize,
    forms: SplitForms,
) -> Result<GluedModes, Reduced1dError> {
    let mut spectrum = problem.solve(count, crate::steklov::CLUSTER_TOL)?;
    let mut states = Vec::with_capacity(count);
    let mut coupling = Vec::with_capacity(count);
    let mut thin_mass = Vec::with_capacity(count + 1);
    for k in 0..=count {
        let mut u = column(&spectrum.eigenfunctions, k);
        let norm = (forms.thin_mass.quad_form(&u) + forms.base_mass.quad_form(&u)).sqrt();
        u.iter_mut().for_each(|x| *x /= norm);
        if k > 0 {
            let mut state = reduced_state_from_fem(glued, &forms, &u, spectrum.eigenvalues[k]);
            let s = orient(&state.grid, &mut state.theta);
            if s < 0.0 {
                u.iter_mut().for_each(|x| *x = -*x);
                state = reduced_state_from_fem(glued, &forms, &u, spectrum.eigenvalues[k]);
            }
            coupling.push(coupling_from_fem(glued, &state, &u));
            states.push(state);
        }
        thin_mass.push(forms.thin_mass.quad_form(&u));
        spectrum.eigenfunctions.set_column(k, &nalgebra::DVector::from_vec(u));
    }
    Ok(GluedModes { spectrum, states, coupling, thin_mass, forms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_disk_mesh, glue_with, ConformalMetric, GlueOptions, GlueParams};

    #[test]
    fn split_forms_add_up_and_profiles_match_compatibility() {
        let base = build_disk_mesh(2);
        let metric = ConformalMetric::flat(base.num_vertices());
        let p = GlueParams::new(0.1, 0.45, 0.5);
        let glued = glue_with(&base, &metric, &p, &GlueOptions::default()).unwrap();
        let forms = SplitForms::new(&glued, MassKind::Consistent).unwrap();
        let problem = SteklovProblem::new(&glued.mesh, &glued.metric, MassKind::Consistent).unwrap();
        let sum = forms.thin_stiffness.add_scaled(&forms.base_stiffness, 1.0);
        let x: Vec<f64> = (0..sum.dim()).map(|i| ((i * 37 % 11) as f64).sin()).collect();
        let (a, b) = (sum.quad_form(&x), problem.stiffness.quad_form(&x));
        assert!((a - b).abs() < 1e-10 * b.abs());
        let (a, b) = (forms.thin_mass.quad_form(&x) + forms.base_mass.quad_form(&x), problem.mass.quad_form(&x));
        assert!((a - b).abs() < 1e-12 * b.abs());

        let modes = analyze_glued(&glued, &problem, 3, forms).unwrap();
        let st = &modes.states[0];
        assert!((st.c0 * st.c0 - modes.thin_mass[1]).abs() < 1e-12);
        let c = &modes.coupling[0];
        assert!(c.relative_mismatch() < 1e-10, "{c:?}");
    }
}
