use thiserror::Error;

/// Errors produced by model construction, propagation, and the CLI runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "Fock cutoff n_max = {n_max} too small for |alpha|^2 = {nbar:.3}: \
         tail mass {tail:.3e} exceeds 1e-8; suggested n_max >= {suggested}"
    )]
    Truncation {
        n_max: usize,
        nbar: f64,
        tail: f64,
        suggested: usize,
    },

    #[error("dense dimension {dim} exceeds the oracle guard {max_dim} (set DIMERDYN_MAX_DIM to override)")]
    DenseDimension { dim: usize, max_dim: usize },

    #[error("oscillator recurrence unstable beyond n = 600 (requested n_max = {0})")]
    RecurrenceOverflow(usize),

    #[error("config error: {0}")]
    Config(String),

    #[error("frame at t = {t:.6} violates invariant: {what}")]
    FrameInvariant { t: f64, what: String },

    #[error("truncation leakage {leak:.3e} exceeds 1e-4 during run")]
    LeakageEscalated { leak: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
