//! Shared numerical kernels: adaptive quadrature, an embedded Runge–Kutta
//! solver with dense output, basic statistics, and the RNG stream rule.

pub mod ode;
pub mod quad;
pub mod rng;
pub mod stats;
