use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("squeezing parameter too close to the unit circle (|tau| = {0})")]
    DegenerateSqueezing(f64),

    #[error("gaussian integral diverges: real part of the quadratic form is not positive definite")]
    NonConvergent,

    #[error("quadrature did not converge: error estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    QuadratureNotConverged { estimate: f64, tolerance: f64 },

    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error("non-finite state at t = {t}")]
    NonFiniteState { t: f64 },

    #[error("fock truncation {dim} too small (need at least {needed})")]
    TruncationTooSmall { dim: usize, needed: usize },

    #[error("initial position lies outside the allowed box")]
    OutsideBox,

    #[error("function grows faster than its declared bound")]
    GrowthViolation,

    #[error("kernel evaluation needs a momentum polynomial of degree at most two")]
    UnsupportedMomentumDependence,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
