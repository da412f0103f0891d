//! Error type shared across the crate.

use thiserror::Error;

/// Errors surfaced by scenario construction, optimization, and experiment IO.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Invalid configuration value or malformed scenario file.
    #[error("config: {0}")]
    Config(String),

    /// Geometry violates the deployment constraints.
    #[error("geometry: {0}")]
    Geometry(String),

    /// Dimension mismatch between operands.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Negative or otherwise invalid power-control input.
    #[error("power allocation: {0}")]
    Power(String),

    /// An iterative solver stopped without meeting its convergence criterion.
    #[error("{algorithm} did not converge: {detail}")]
    NonConvergence { algorithm: &'static str, detail: String },

    /// Experiment specification is unusable.
    #[error("experiment spec: {0}")]
    Spec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
