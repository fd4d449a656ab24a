use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole error: θ = {theta} lies within {distance:e} of a pole")]
    Pole { theta: f64, distance: f64 },
    #[error("Pauli criterion violated for λ = {lambda}, j = {j}")]
    Criterion { lambda: String, j: String },
    #[error("singular Gibbs parameter: 1 + c·c = {0}")]
    SingularParameter(String),
    #[error("string singularity: {0}")]
    StringSingularity(String),
    #[error("structural error: {0}")]
    Structural(String),
    #[error("consistency error: {0}")]
    Consistency(String),
    #[error("classification error: {0}")]
    Classification(String),
    #[error("step size underflow at r = {r}")]
    StepUnderflow { r: f64 },
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("unknown profile: {0}")]
    UnknownProfile(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
