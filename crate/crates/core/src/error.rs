use thiserror::Error;

/// Errors raised by the model computations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    /// The spectral parameter lies where the requested object is undefined
    /// (branch cut, fiber eigenvalue, pole of a symbol).
    #[error("domain error at mode {mode:?}, lambda = {lambda}: {reason}")]
    Domain {
        mode: Vec<i64>,
        lambda: String,
        reason: String,
    },
    /// `lambda` is (numerically) an eigenvalue of the realization on this mode.
    #[error("lambda = {lambda} is (near) an eigenvalue of the realization: |l^lambda| = {modulus:e} on mode {mode:?}")]
    NearEigenvalue {
        mode: Vec<i64>,
        lambda: String,
        modulus: f64,
    },
    /// A finite-difference matrix was singular to working precision.
    #[error("finite-difference system is singular near lambda = {lambda} on mode {mode:?}")]
    SingularSystem { mode: Vec<i64>, lambda: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, LabError>;

impl LabError {
    pub(crate) fn domain(mode: &[i64], lambda: impl std::fmt::Display, reason: impl Into<String>) -> Self {
        LabError::Domain {
            mode: mode.to_vec(),
            lambda: lambda.to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        LabError::InvalidInput(msg.into())
    }
}
