use thiserror::Error;

/// Errors raised by the engines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("vanishing denominator n^2 - j^2 + z at vertex j = {vertex} (n = {n}, z = {z})")]
    Singular { n: u32, vertex: i64, z: f64 },

    #[error("banded factorization broke down at shift {shift} after {retries} perturbations")]
    FactorizationBreakdown { shift: f64, retries: u32 },

    #[error(
        "truncation did not converge after {doublings} doublings (last dim {dim}, worst relative change {worst_change:e})"
    )]
    NoConvergence {
        doublings: u32,
        dim: usize,
        worst_change: f64,
    },

    #[error("{0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
