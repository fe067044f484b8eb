//! The model profiles of the thin part on `v ∈ [0, 1]`:
//! `f = sin πv`, `f₁ = (1−v)cos πv − sin πv/(2π)` and
//! `f₂ = (−v²/2 + v − (1/2 + 3/(8π²))) sin πv`, solving
//! `−f₁″ − π²f₁ = −2πf` and `−f₂″ − π²f₂ = −2πf₁`.

use std::f64::consts::PI;

/// Additive constant of the polynomial factor of `f₂`.
pub const F2_SHIFT: f64 = 0.5 + 3.0 / (8.0 * PI * PI);

/// Values `[g, g′, g″]` of the three profiles.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ModelFunctions;

impl ModelFunctions {
    pub fn f(v: f64) -> [f64; 3] {
        let (s, c) = (PI * v).sin_cos();
        [s, PI * c, -PI * PI * s]
    }

    pub fn f1(v: f64) -> [f64; 3] {
        let (s, c) = (PI * v).sin_cos();
        let w = 1.0 - v;
        [
            w * c - s / (2.0 * PI),
            -1.5 * c - PI * w * s,
            2.5 * PI * s - PI * PI * w * c,
        ]
    }

    pub fn f2(v: f64) -> [f64; 3] {
        let (s, c) = (PI * v).sin_cos();
        let p = -0.5 * v * v + v - F2_SHIFT;
        let dp = 1.0 - v;
        [p * s, dp * s + PI * p * c, -s + 2.0 * PI * dp * c - PI * PI * p * s]
    }

    /// `θ̄/c₀ = f + q f₁ + q² f₂` and its derivative, with `q = c₁/c₀`.
    pub fn profile(v: f64, q: f64) -> [f64; 2] {
        let (a, b, c) = (Self::f(v), Self::f1(v), Self::f2(v));
        [a[0] + q * b[0] + q * q * c[0], a[1] + q * b[1] + q * q * c[1]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn end_values() {
        assert_eq!(ModelFunctions::f1(0.0)[0], 1.0);
        assert!(ModelFunctions::f1(1.0)[0].abs() < 1e-15);
        assert_eq!(ModelFunctions::f2(0.0)[0], 0.0);
        assert!(ModelFunctions::f2(1.0)[0].abs() < 1e-15);
        assert_eq!(ModelFunctions::profile(0.0, 0.3)[0], 0.3);
    }

    #[test]
    fn derivatives_match_differences() {
        let h = 1e-5;
        for g in [ModelFunctions::f, ModelFunctions::f1, ModelFunctions::f2] {
            for k in 1..10 {
                let v = k as f64 / 10.0;
                let d1 = (g(v + h)[0] - g(v - h)[0]) / (2.0 * h);
                let d2 = (g(v + h)[1] - g(v - h)[1]) / (2.0 * h);
                assert!((d1 - g(v)[1]).abs() < 1e-8);
                assert!((d2 - g(v)[2]).abs() < 1e-8);
            }
        }
    }
}
