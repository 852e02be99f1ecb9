//! Shared numerical building blocks: quadrature, an adaptive Runge-Kutta pair,
//! compensated summation and a safeguarded scalar root finder.

pub mod kahan;
pub mod ode;
pub mod quad;
pub mod root;

pub use kahan::{ComplexSum, KahanSum};
pub use ode::{Dopri5, OdeStats};
pub use quad::{adaptive_gl, composite_gl, gl_rule};
pub use root::newton_bracketed;
