//! Numerical laboratory for Steklov eigenvalue problems on surfaces with boundary.
//!
//! The crate builds triangulated base surfaces, attaches a thin cuspidal strip
//! along two boundary intervals, computes Steklov spectra by finite elements,
//! evaluates the closed-form bounds and asymptotic expansions for the glued
//! surfaces, solves the reduced one-dimensional model of the thin part, and
//! maximizes `σ₁·L` over boundary densities.

pub mod asymptotics;
pub mod geometry;
pub mod lab;
pub mod linalg;
pub mod reduced1d;
pub mod shapeopt;
pub mod steklov;
