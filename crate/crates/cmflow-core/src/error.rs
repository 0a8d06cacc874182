//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CmError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported kernel dimension n = {0} (supported: 1..=6)")]
    UnsupportedDimension(u32),

    #[error("dm_bound_ratio requires kappa = 1, got {0}")]
    UnsupportedKappa(f64),

    #[error("quadrature failed to converge: {0}")]
    QuadratureFailure(String),

    #[error("coincident points: distance-based quantity undefined at x = x0")]
    CoincidentPoints,

    #[error("unsupported point pair: {0}")]
    UnsupportedPair(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("self-intersection detected at t = {t}: segments {i} and {j} cross")]
    SelfIntersection { t: f64, i: usize, j: usize },

    #[error("gaussian density needs at least 4 checkpoints before t0, found {0}")]
    InsufficientCheckpoints(usize),

    #[error("bad configuration: {0}")]
    BadConfig(String),

    #[error("checkpoint t = {0} too near the trace ends for a centered difference")]
    CheckpointAtTraceEnd(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CmError>;
