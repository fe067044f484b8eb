//! Closed-form layer for the thin part: the `θ` change of variables and its
//! energy identities, the model profiles `f, f₁, f₂`, the test-function upper
//! bounds and the asymptotic expansion of the first eigenvalue.

mod bounds;
mod change;
mod model;

pub use bounds::{
    cusp_branch, cusp_test_quotient, expansion_sigma, expansion_theta, integral_i, ProfileExpansion, upper_bound_first,
    upper_bound_kplus1, BoundReport, Expansion, ExpansionInput,
};
pub use change::{
    energy_identity_residuals, phi_of_theta, phi_scale, theta_of_phi, IdentityResiduals, TensorRule, ThetaField,
};
pub use model::{ModelFunctions, F2_SHIFT};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AsymptoticsError {
    #[error("quadrature underflow: {detail}")]
    QuadratureUnderflow { detail: String },
    #[error("invalid input: {detail}")]
    InvalidInput { detail: String },
}
