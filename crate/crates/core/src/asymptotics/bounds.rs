//! Test-function upper bounds for the glued surface and the asymptotic
//! expansion of its first eigenpair. Error scales are reported alongside the
//! main terms and never added to them.

use std::f64::consts::PI;

use crate::geometry::GlueParams;
use crate::linalg::quadrature::integrate;

use super::model::ModelFunctions;
use super::AsymptoticsError;

/// `t/8 + tπ²/(2 ln²r)`, the Dirichlet ground level of the strip.
pub fn cusp_branch(params: &GlueParams) -> f64 {
    let l = params.log_inv_r();
    params.t * (0.125 + PI * PI / (2.0 * l * l))
}

/// `I = ∫₀¹ r^{v/2} sin πv dv = 4π(1 + √r)/(ln²r + 4π²)`.
pub fn integral_i(r: f64) -> f64 {
    let l2 = r.ln().powi(2);
    4.0 * PI * (1.0 + r.sqrt()) / (l2 + 4.0 * PI * PI)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundReport {
    pub branch_star: f64,
    pub branch_cusp: f64,
    pub bound: f64,
    pub error_scale: f64,
}

/// Bound on `σ¹(Σ_ε)`: `min{σ⋆, t/8 + tπ²/(2 ln²r)}` with error scale
/// `ε/ln²(1/r) + ε²` (the larger of the two branch scales once `ln(1/r) ≥ 1`).
pub fn upper_bound_first(params: &GlueParams, sigma_star: f64) -> BoundReport {
    let (eps, l) = (params.eps, params.log_inv_r());
    let cusp = cusp_branch(params);
    BoundReport { branch_star: sigma_star, branch_cusp: cusp, bound: sigma_star.min(cusp), error_scale: eps / (l * l) + eps * eps }
}

/// Bound on `σ^{K+1}(Σ_ε)`: `max{σ⋆, t/8 + tπ²/(2 ln²r)}` with error scale
/// `ε/ln(1/r) + ε^{1/2}/ln(1/r)^{3/2} + ε²`.
pub fn upper_bound_kplus1(params: &GlueParams, sigma_star: f64) -> BoundReport {
    let (eps, l) = (params.eps, params.log_inv_r());
    let cusp = cusp_branch(params);
    BoundReport {
        branch_star: sigma_star,
        branch_cusp: cusp,
        bound: sigma_star.max(cusp),
        error_scale: eps / l + eps.sqrt() / l.powf(1.5) + eps * eps,
    }
}

/// Rayleigh quotient, with the boundary mean removed, of the strip test
/// function `θ = sin πv` extended by zero, on a surface of total boundary
/// length `total_length`.
pub fn cusp_test_quotient(params: &GlueParams, total_length: f64) -> f64 {
    let (eps, r, l) = (params.eps, params.r, params.log_inv_r());
    let jac = |v: f64| (1.0 + eps * eps * (-2.0 * v * l).exp()).sqrt();
    let mass = 2.0 * integrate(|v| (PI * v).sin().powi(2) * jac(v), 0.0, 1.0, 1e-14).value;
    let mean = 2.0 * (l * eps / params.t).sqrt() * integrate(|v| r.powf(v / 2.0) * (PI * v).sin() * jac(v), 0.0, 1.0, 1e-14).value;
    cusp_branch(params) / (mass - mean * mean / total_length)
}

/// The scalars of the first mode (`c₀ = √M`, `c₁ = θ̄(0)`) and optionally of a
/// second mode (`d₀`, `d₁`).
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionInput {
    pub params: GlueParams,
    pub c0: f64,
    pub c1: f64,
    pub second: Option<(f64, f64)>,
}

impl ExpansionInput {
    pub fn new(params: GlueParams, c0: f64, c1: f64) -> Self {
        Self { params, c0, c1, second: None }
    }

    pub fn validate(&self) -> Result<(), AsymptoticsError> {
        let ok = |c0: f64, c1: f64| c0 > 0.0 && c0 <= 1.0 && c1.is_finite();
        if !ok(self.c0, self.c1) || self.second.is_some_and(|(d0, d1)| !ok(d0, d1)) {
            return Err(AsymptoticsError::InvalidInput { detail: format!("c₀ = {} must lie in (0, 1]", self.c0) });
        }
        Ok(())
    }

    /// The same input with `(d₀, d₁)` in place of `(c₀, c₁)`.
    pub fn second_mode(&self) -> Option<Self> {
        self.second.map(|(d0, d1)| Self { params: self.params.clone(), c0: d0, c1: d1, second: None })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expansion {
    pub sigma: f64,
    /// `t(ε^{(3+α)/2} ln³(1/ε)/c₀³ + ε^{1+α})`.
    pub error_scale: f64,
}

/// `σ = t(1/8 + π²/(2 ln²r) − (c₁/c₀) π/ln²r)`.
pub fn expansion_sigma(input: &ExpansionInput) -> Result<Expansion, AsymptoticsError> {
    input.validate()?;
    let p = &input.params;
    let (eps, l, a) = (p.eps, p.log_inv_r(), p.alpha_effective());
    let q = input.c1 / input.c0;
    let sigma = cusp_branch(p) - p.t * q * PI / (l * l);
    let log = (1.0 / eps).ln();
    let error_scale = p.t * (eps.powf(0.5 * (3.0 + a)) * log.powi(3) / input.c0.powi(3) + eps.powf(1.0 + a));
    Ok(Expansion { sigma, error_scale })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProfileExpansion {
    pub theta: Vec<f64>,
    pub theta_v: Vec<f64>,
    /// `ε^{3(1−α)/2} ln³(1/ε)/c₀³ + ε^{1−α}`, relative to `c₀`.
    pub error_scale: f64,
}

/// `θ̄ ≈ c₀(f + q f₁ + q² f₂)` and its derivative on `grid`, `q = c₁/c₀`.
pub fn expansion_theta(grid: &[f64], input: &ExpansionInput) -> Result<ProfileExpansion, AsymptoticsError> {
    input.validate()?;
    let q = input.c1 / input.c0;
    let (theta, theta_v) = grid
        .iter()
        .map(|&v| {
            let [g, dg] = ModelFunctions::profile(v, q);
            (input.c0 * g, input.c0 * dg)
        })
        .unzip();
    let p = &input.params;
    let (eps, a) = (p.eps, p.alpha_effective());
    let error_scale = eps.powf(1.5 * (1.0 - a)) * (1.0 / eps).ln().powi(3) / input.c0.powi(3) + eps.powf(1.0 - a);
    Ok(ProfileExpansion { theta, theta_v, error_scale })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integral_limits() {
        assert!((integral_i(1.0 - 1e-12) - 2.0 / PI).abs() < 1e-10);
        let r: f64 = 1e-300;
        let l2 = r.ln().powi(2);
        assert!((integral_i(r) * l2 / (4.0 * PI) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn branches() {
        let p = GlueParams::new(0.1, 0.45, 1.0);
        let b = upper_bound_first(&p, 10.0);
        assert!((b.branch_cusp - (0.125 + PI * PI / (2.0 * 10f64.powf(0.9)))).abs() < 1e-15);
        assert_eq!(b.bound, b.branch_cusp);
        assert_eq!(upper_bound_kplus1(&p, 0.0).bound, b.branch_cusp);
        let sigma_star = 0.3;
        let star = GlueParams::new(1e-3, 0.45, 8.0 * sigma_star);
        let b = upper_bound_first(&star, sigma_star);
        assert!((b.branch_cusp - b.branch_star).abs() < 0.05);
    }

    #[test]
    fn expansion_reduces_and_hits_c1() {
        let p = GlueParams::new(0.1, 0.45, 2.0);
        let zero = expansion_sigma(&ExpansionInput::new(p.clone(), 0.7, 0.0)).unwrap();
        assert_eq!(zero.sigma, cusp_branch(&p));
        let pos = expansion_sigma(&ExpansionInput::new(p.clone(), 0.7, 0.1)).unwrap();
        assert!(pos.sigma < zero.sigma);
        let grid: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
        let e = expansion_theta(&grid, &ExpansionInput::new(p.clone(), 0.7, 0.1)).unwrap();
        assert!((e.theta[0] - 0.1).abs() < 1e-16);
        let flat = expansion_theta(&grid, &ExpansionInput::new(p, 0.7, 0.0)).unwrap();
        for (g, v) in flat.theta.iter().zip(&grid) {
            assert!((g - 0.7 * (PI * v).sin()).abs() < 1e-15);
        }
    }
}
