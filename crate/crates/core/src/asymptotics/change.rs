//! The substitution `φ(x, y) = √t y^{-1/2} θ(x, ln y / ln r) / (√ε √ln(1/r))`
//! between the rescaled strip `Ω = {r ≤ y ≤ 1, |x| ≤ y²/2}` and
//! `Ω̃ = {0 ≤ v ≤ 1, |x| ≤ r^{2v}/2}`, and quadrature checks of the three
//! energy identities it induces.

use crate::geometry::GlueParams;
use crate::linalg::quadrature::gauss_legendre_unit;

use super::AsymptoticsError;

/// `√t y^{-1/2} / (√ε √ln(1/r))`.
pub fn phi_scale(y: f64, params: &GlueParams) -> f64 {
    (params.t / (y * params.eps * params.log_inv_r())).sqrt()
}

/// Maps samples `[x, y, φ]` on `Ω` to `[x, v, θ]` on `Ω̃`.
pub fn theta_of_phi(samples: &[[f64; 3]], params: &GlueParams) -> Vec<[f64; 3]> {
    let l = params.log_inv_r();
    samples.iter().map(|&[x, y, phi]| [x, -y.ln() / l, phi / phi_scale(y, params)]).collect()
}

/// Maps samples `[x, v, θ]` on `Ω̃` to `[x, y, φ]` on `Ω`.
pub fn phi_of_theta(samples: &[[f64; 3]], params: &GlueParams) -> Vec<[f64; 3]> {
    let l = params.log_inv_r();
    samples
        .iter()
        .map(|&[x, v, theta]| {
            let y = (-v * l).exp();
            [x, y, theta * phi_scale(y, params)]
        })
        .collect()
}

/// A function on `Ω̃` returning `[θ, θ_x, θ_v]`.
pub trait ThetaField {
    fn eval(&self, x: f64, v: f64) -> [f64; 3];
}

impl<F: Fn(f64, f64) -> [f64; 3]> ThetaField for F {
    fn eval(&self, x: f64, v: f64) -> [f64; 3] {
        self(x, v)
    }
}

/// Composite tensor rule: `panels` equal panels per direction with `points`
/// nodes each (1 is the midpoint rule, more are Gauss-Legendre).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TensorRule {
    pub panels_long: usize,
    pub panels_across: usize,
    pub points: usize,
}

impl TensorRule {
    pub fn midpoint(panels: usize) -> Self {
        Self { panels_long: panels, panels_across: panels, points: 1 }
    }

    pub fn gauss(panels: usize, points: usize) -> Self {
        Self { panels_long: panels, panels_across: panels, points }
    }

    fn nodes(&self, a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
        let (x, w) = if self.points == 1 { (vec![0.5], vec![1.0]) } else { gauss_legendre_unit(self.points) };
        let h = (b - a) / panels as f64;
        (0..panels)
            .flat_map(|p| {
                let lo = a + p as f64 * h;
                x.iter().zip(&w).map(move |(xi, wi)| (lo + xi * h, wi * h)).collect::<Vec<_>>()
            })
            .collect()
    }
}

/// `|LHS − RHS|` of the boundary-square, boundary-mean and energy identities
/// (the first two maximized over the sides `I±`), with the left-hand values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityResiduals {
    pub square: f64,
    pub mean: f64,
    pub gradient: f64,
    pub mass: f64,
    pub energy: f64,
}

fn d4(g: &dyn Fn(f64) -> f64, z: f64, h: f64) -> f64 {
    (g(z - 2.0 * h) - 8.0 * g(z - h) + 8.0 * g(z + h) - g(z + 2.0 * h)) / (12.0 * h)
}

/// Evaluates both sides of the identities independently: the left sides in
/// physical strip coordinates `X = ε²x, Y = εy` with metric `t⁻²(dX² + dY²)`,
/// derivatives by central differences of `φ`; the right sides in `(x, v)`.
pub fn energy_identity_residuals(
    theta: &dyn ThetaField,
    params: &GlueParams,
    rule: &TensorRule,
) -> Result<IdentityResiduals, AsymptoticsError> {
    if rule.panels_long == 0 || rule.panels_across == 0 || rule.points == 0 {
        return Err(AsymptoticsError::QuadratureUnderflow { detail: "empty quadrature rule".into() });
    }
    let (eps, t, r, l) = (params.eps, params.t, params.r, params.log_inv_r());
    if !(eps * r > 0.0 && r < 1.0 && t > 0.0) {
        return Err(AsymptoticsError::QuadratureUnderflow { detail: format!("strip [{}, {eps}] is degenerate", eps * r) });
    }
    let phys = |xx: f64, yy: f64| -> f64 {
        let (x, y) = (xx / (eps * eps), yy / eps);
        let v = -y.ln() / l;
        theta.eval(x, v)[0] * phi_scale(y, params)
    };
    let y_nodes = rule.nodes(eps * r, eps, rule.panels_long);
    let s_nodes = rule.nodes(-1.0, 1.0, rule.panels_across);
    let v_nodes = rule.nodes(0.0, 1.0, rule.panels_long);

    let mut lhs_sq = [0.0; 2];
    let mut lhs_mean = [0.0; 2];
    let mut lhs_energy = 0.0;
    for &(yy, wy) in &y_nodes {
        let dl = (1.0 + yy * yy).sqrt() / t;
        for (k, side) in [1.0, -1.0].into_iter().enumerate() {
            let phi = phys(side * yy * yy / 2.0, yy);
            lhs_sq[k] += wy * dl * phi * phi;
            lhs_mean[k] += wy * dl * phi;
        }
        let half = yy * yy / 2.0;
        for &(s, ws) in &s_nodes {
            let xx = s * half;
            let gx = d4(&|z| phys(z, yy), xx, 1e-3 * half);
            let gy = d4(&|z| phys(xx, z), yy, 1e-3 * yy);
            lhs_energy += wy * ws * half * (gx * gx + gy * gy);
        }
    }

    let mut rhs_sq = [0.0; 2];
    let mut rhs_mean = [0.0; 2];
    let mut rhs_x = 0.0;
    let mut rhs_mean_part = 0.0;
    for &(v, wv) in &v_nodes {
        let r2v = (-2.0 * v * l).exp();
        let jac = (1.0 + eps * eps * r2v).sqrt();
        for (k, side) in [1.0, -1.0].into_iter().enumerate() {
            let th = theta.eval(side * r2v / 2.0, v)[0];
            rhs_sq[k] += wv * th * th * jac;
            rhs_mean[k] += wv * (-0.5 * v * l).exp() * th * jac;
        }
        for &(s, ws) in &s_nodes {
            let [th, th_x, th_v] = theta.eval(s * r2v / 2.0, v);
            rhs_x += wv * ws * (r2v / 2.0) * th_x * th_x;
            let g = th / 2.0 + th_v / l;
            rhs_mean_part += wv * ws * 0.5 * g * g;
        }
    }
    let mean_scale = (l * eps / t).sqrt();
    let rhs_energy = t * (rhs_x / (eps * eps) + rhs_mean_part);

    let out = IdentityResiduals {
        square: (0..2).map(|k| (lhs_sq[k] - rhs_sq[k]).abs()).fold(0.0, f64::max),
        mean: (0..2).map(|k| (lhs_mean[k] - mean_scale * rhs_mean[k]).abs()).fold(0.0, f64::max),
        gradient: (lhs_energy - rhs_energy).abs(),
        mass: lhs_sq[0] + lhs_sq[1],
        energy: lhs_energy,
    };
    if [out.square, out.mean, out.gradient].iter().all(|x| x.is_finite()) {
        Ok(out)
    } else {
        Err(AsymptoticsError::QuadratureUnderflow { detail: "non-finite quadrature value".into() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn params() -> GlueParams {
        GlueParams::new(0.1, 0.4, 0.7)
    }

    #[test]
    fn round_trip_and_test_function() {
        let p = params();
        let l = p.log_inv_r();
        let pts: Vec<[f64; 3]> = (1..20)
            .map(|k| {
                let v = k as f64 / 20.0;
                let y = (-v * l).exp();
                [0.3 * y * y * (v - 0.5), y, (PI * v).sin() * phi_scale(y, &p)]
            })
            .collect();
        let th = theta_of_phi(&pts, &p);
        for (a, b) in th.iter().zip(&pts) {
            assert!((a[2] - (PI * a[1]).sin()).abs() < 1e-12);
            assert_eq!(a[0], b[0]);
        }
        let back = phi_of_theta(&th, &p);
        for (a, b) in back.iter().zip(&pts) {
            assert!((a[1] - b[1]).abs() < 1e-12 * b[1] && (a[2] - b[2]).abs() < 1e-12 * b[2].abs().max(1.0));
        }
    }

    #[test]
    fn x_independent_profile_reduces_to_the_mean_energy() {
        let p = params();
        let l = p.log_inv_r();
        let f = |_: f64, v: f64| [(PI * v).sin(), 0.0, PI * (PI * v).cos()];
        let res = energy_identity_residuals(&f, &p, &TensorRule::gauss(48, 8)).unwrap();
        assert!(res.gradient < 1e-8 && res.square < 1e-10 && res.mean < 1e-10, "{res:?}");
        let want = p.t * (0.125 + PI * PI / (2.0 * l * l));
        assert!((res.energy - want).abs() < 1e-8 * want);
    }

    #[test]
    fn midpoint_residuals_are_second_order() {
        let p = params();
        let g = |x: f64, v: f64| [(PI * v).sin() + 3.0 * x * v, 3.0 * v, PI * (PI * v).cos() + 3.0 * x];
        let a = energy_identity_residuals(&g, &p, &TensorRule::midpoint(160)).unwrap();
        let b = energy_identity_residuals(&g, &p, &TensorRule::midpoint(320)).unwrap();
        for (ra, rb) in [(a.square, b.square), (a.gradient, b.gradient)] {
            let ratio = ra / rb;
            assert!((3.5..4.5).contains(&ratio), "{ratio} {a:?} {b:?}");
        }
    }
}
