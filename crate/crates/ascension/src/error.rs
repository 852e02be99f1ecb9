use thiserror::Error;

/// Errors raised by the geometric and spectral routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not in SL(2,R): det = {det}")]
    NotUnimodular { det: f64 },

    #[error("expected a vector of length {expected}, got {actual}")]
    WrongLength { expected: f64, actual: f64 },

    #[error("point is not in the upper half-plane (y = {0})")]
    OutsideHalfPlane(f64),

    #[error("angle {0} is outside the cylinder chart |beta| < pi/2")]
    OutsideChart(f64),

    #[error("Q-form is not positive (Q = {0})")]
    NonPositiveQ(f64),

    #[error("parameters outside the admissible window: {0}")]
    OutsideWindow(String),

    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error("integrator exceeded {0} steps")]
    TooManySteps(usize),

    #[error("quadrature did not converge on [{a}, {b}]")]
    QuadratureFailed { a: f64, b: f64 },

    #[error("root not bracketed: {0}")]
    RootNotBracketed(String),

    #[error("fundamental-domain reduction exceeded {0} steps")]
    ReductionGuard(usize),

    #[error("Whittaker seed: {0}")]
    WhittakerSeed(String),

    #[error("value not representable as f64 (log-magnitude {0})")]
    Unrepresentable(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
