use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("distribution needs at least one atom")]
    Empty,

    #[error("value at index {index} is not finite: {value}")]
    NonFiniteValue { index: usize, value: f64 },

    #[error("weight at index {index} must be finite and positive, got {weight}")]
    InvalidWeight { index: usize, weight: f64 },

    #[error("total weight must be positive and finite, got {0}")]
    InvalidTotal(f64),

    #[error("risk level alpha must lie strictly inside (0, 1), got {0}")]
    InvalidAlpha(f64),

    #[error("{name} = {value} is outside the admissible domain {domain}")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("scenario has {got} entries but the distribution has {expected} atoms")]
    Misaligned { expected: usize, got: usize },

    #[error("invalid scenario density: {0}")]
    InvalidScenario(String),

    #[error("invalid distortion function: {0}")]
    InvalidDistortion(String),

    #[error("invalid density or mixing measure: {0}")]
    InvalidDensity(String),

    #[error("subset enumeration limited to {max} atoms, got {got}")]
    TooManyAtoms { max: usize, got: usize },

    #[error("{solver} did not converge after {iterations} iterations (last point {last}, residual {residual:e})")]
    NoConvergence {
        solver: &'static str,
        iterations: usize,
        last: f64,
        residual: f64,
    },

    #[error("ordering CVaR >= EVaR >= u_Lambda violated: cvar = {cvar}, evar = {evar}, u_lambda = {u_lambda}")]
    OrderingViolation {
        cvar: f64,
        evar: f64,
        u_lambda: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
