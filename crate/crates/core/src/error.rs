use thiserror::Error;

/// Errors surfaced by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    /// A qubit count or vector length is outside the operation's domain.
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    /// Two arguments that must agree in size do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An ensemble or experiment specification violates its invariants.
    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    /// A task was posed with arguments that make it ill-defined.
    #[error("invalid task: {0}")]
    InvalidTask(String),

    /// Input failed a numerical validation check (e.g. normalization).
    #[error("validation failed: {0}")]
    Validation(String),

    /// The request exceeds a hard resource cap (dense oracles, statevectors).
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    /// Iterative optimisation did not reach tolerance; retry with a new seed.
    #[error("did not converge after {iters} iterations (residual {residual:.3e})")]
    NonConvergence { iters: usize, residual: f64 },

    /// A ratio estimator's denominator was not positive; increase shots.
    #[error("unstable estimate: {0}")]
    UnstableEstimate(String),

    /// Projection basis is rank deficient (all training features identical).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
