//! Shared numerical kernels: quadrature rules, differentiation matrices,
//! an embedded Runge-Kutta stepper, and scalar maximization.

pub mod gauss;
pub mod ode;
pub mod search;
pub mod spectral;
