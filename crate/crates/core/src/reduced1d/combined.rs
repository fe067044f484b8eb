//! The two-mode test function `Ψ = u^l + γu¹`, `γ = −d₁/c₁`, whose profile
//! vanishes at `v = 0`, tested in the Rayleigh quotient of the thick part.

use super::fem::GluedModes;
use super::model::ReducedState;
use super::Reduced1dError;

/// Thin-part energy and mass Gram matrices of `(u¹, u^l)` at unit total mass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThinGram {
    pub e: [[f64; 2]; 2],
    pub m: [[f64; 2]; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub struct CombinedBound {
    pub gamma: f64,
    /// `(γ²σ¹ + σ^l)/(1 + γ²)`.
    pub leading: f64,
    pub a: f64,
    pub b: f64,
    pub bound: f64,
    /// Thick-part quotient of `u¹` alone, `(σ¹ − E₁₁)/(1 − M₁₁)`.
    pub single_bound: f64,
    /// Profile of `Ψ` at `v = 0`, `d₁ + γc₁`.
    pub theta0: f64,
}

pub fn combined_test_function(
    first: &ReducedState,
    second: &ReducedState,
    gram: &ThinGram,
) -> Result<CombinedBound, Reduced1dError> {
    let c1 = first.c1;
    if !(c1.abs() > 1e-12) {
        return Err(Reduced1dError::DegenerateC1 { c1 });
    }
    let gamma = -second.c1 / c1;
    let (s1, sl) = (first.sigma, second.sigma);
    let g2 = gamma * gamma;
    let quad = |q: &[[f64; 2]; 2]| q[1][1] + 2.0 * gamma * q[0][1] + g2 * q[0][0];
    let (thin_energy, thin_mass) = (quad(&gram.e), quad(&gram.m));
    let lead_num = g2 * s1 + sl;
    let a = lead_num * thin_mass - (g2 + 1.0) * thin_energy;
    let b = g2 + 1.0 - thin_mass;
    let leading = lead_num / (1.0 + g2);
    Ok(CombinedBound {
        gamma,
        leading,
        a,
        b,
        bound: leading + a / ((g2 + 1.0) * b),
        single_bound: (s1 - gram.e[0][0]) / (1.0 - gram.m[0][0]),
        theta0: second.c1 + gamma * c1,
    })
}

/// Among modes `2..=K+1` the one with thin mass `≥ 1/(4K)`, largest first.
pub fn select_second_mode(thin_mass: &[f64], k: usize) -> Option<usize> {
    (2..=k + 1)
        .filter(|&l| l < thin_mass.len() && thin_mass[l] >= 1.0 / (4.0 * k as f64))
        .max_by(|&a, &b| thin_mass[a].total_cmp(&thin_mass[b]))
}

/// Gram matrices of modes `1` and `l` from analyzed glued eigenfunctions.
pub fn gram_from_fem(modes: &GluedModes, l: usize) -> ThinGram {
    let (u1, ul) = (modes.mode(1), modes.mode(l));
    let f = &modes.forms;
    ThinGram {
        e: [
            [f.thin_stiffness.quad_form(&u1), f.thin_stiffness.bilinear(&u1, &ul)],
            [f.thin_stiffness.bilinear(&u1, &ul), f.thin_stiffness.quad_form(&ul)],
        ],
        m: [
            [f.thin_mass.quad_form(&u1), f.thin_mass.bilinear(&u1, &ul)],
            [f.thin_mass.bilinear(&u1, &ul), f.thin_mass.quad_form(&ul)],
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GlueParams;

    fn state(sigma: f64, c0: f64, c1: f64) -> ReducedState {
        let p = GlueParams::new(0.1, 0.45, 1.0);
        let grid = vec![0.0, 0.5, 1.0];
        let mut s = ReducedState::from_profile(&p, grid, vec![c1, 0.5, 0.0], sigma, Some(c0 * c0), None);
        s.c1 = c1;
        s
    }

    #[test]
    fn opposite_ends_cancel() {
        let g = ThinGram { e: [[0.1, 0.02], [0.02, 0.2]], m: [[0.4, 0.05], [0.05, 0.3]] };
        let r = combined_test_function(&state(1.0, 0.6, 0.2), &state(1.3, 0.6, -0.2), &g).unwrap();
        assert_eq!(r.gamma, 1.0);
        assert_eq!(r.theta0, 0.0);
        let same = combined_test_function(&state(1.0, 0.6, 0.2), &state(1.0, 0.6, 0.5), &g).unwrap();
        assert!((same.leading - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bound_is_the_thick_quotient() {
        let g = ThinGram { e: [[0.1, 0.02], [0.02, 0.2]], m: [[0.4, 0.05], [0.05, 0.3]] };
        let r = combined_test_function(&state(1.0, 0.6, 0.2), &state(1.3, 0.5, -0.1), &g).unwrap();
        let gm = r.gamma;
        let te = g.e[1][1] + 2.0 * gm * g.e[0][1] + gm * gm * g.e[0][0];
        let tm = g.m[1][1] + 2.0 * gm * g.m[0][1] + gm * gm * g.m[0][0];
        let direct = (gm * gm * 1.0 + 1.3 - te) / (gm * gm + 1.0 - tm);
        assert!((r.bound - direct).abs() < 1e-14);
        assert!(matches!(
            combined_test_function(&state(1.0, 0.6, 0.0), &state(1.3, 0.5, -0.1), &g),
            Err(Reduced1dError::DegenerateC1 { .. })
        ));
    }

    #[test]
    fn second_mode_choice() {
        assert_eq!(select_second_mode(&[0.0, 0.5, 0.1, 0.3], 2), Some(3));
        assert_eq!(select_second_mode(&[0.0, 0.5, 0.01, 0.02], 2), None);
    }
}
