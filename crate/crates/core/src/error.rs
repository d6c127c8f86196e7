//! Error type shared by all solvers.

/// Library-wide error type.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A constructor argument violates a documented invariant.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An argument lies outside the function's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A caller-side contract (precondition) was violated.
    #[error("contract violation: {0}")]
    Contract(String),

    /// The actuation state does not match the mode an operation expects.
    #[error("actuation mode mismatch: expected {expected}, got {got}")]
    ActuationMode {
        expected: &'static str,
        got: &'static str,
    },

    /// A spatial profile evaluated to a non-physical value.
    #[error("profile error: {0}")]
    Profile(String),

    /// The requested state is outside the model's physical validity range.
    #[error("physically invalid state: {0}")]
    PhysicalValidity(String),

    /// An integrand produced a non-finite sample.
    #[error("integrand evaluated to a non-finite value at s = {abscissa}")]
    NonFiniteIntegrand { abscissa: f64 },

    /// An iterative solver stopped without reaching its tolerance.
    #[error("solver failed to converge: {0}")]
    NonConvergence(String),

    /// A series expansion showed growing terms.
    #[error("series divergence: {0}")]
    Divergence(String),

    /// A run configuration is inconsistent.
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
