use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter violates its documented invariant. `field` is a dotted path
    /// such as `material.q_s`.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    /// A coherent amplitude is too large for the requested Fock truncation.
    #[error("truncation guard violated: |alpha|^2 = {alpha_sq:.6} needs |alpha|^2 < N/4, but N = {dim}; use N >= {required}")]
    TruncationGuard {
        alpha_sq: f64,
        dim: usize,
        required: usize,
    },

    #[error("unknown polarization label `{0}` (expected one of V, H, D, A, R, L)")]
    UnknownLabel(String),

    #[error("rotation axis is not a unit vector (norm = {0})")]
    NonUnitAxis(f64),

    #[error("state has zero norm")]
    ZeroNorm,
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
