use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("B-spline order must be at least {min}, got {order}")]
    InvalidOrder { order: usize, min: usize },

    #[error("unknown kernel `{0}` (expected one of bs2bs1, bs3bs2, bs4bs3, bs5bs4, bs6bs5, ib4, ib6)")]
    UnknownKernel(String),

    #[error("DFIB requires C² kernel (`{kernel}` is only C^{smoothness})")]
    InsufficientSmoothness { kernel: String, smoothness: i32 },

    #[error("DFIB requires an isotropic kernel, got composite `{0}`")]
    NotIsotropic(String),

    #[error("N must be a power of two and at least 8, got {0}")]
    GridSize(usize),

    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("incompatible Poisson right-hand side: mean {mean:e} exceeds tolerance (norm {norm:e})")]
    IncompatibleRhs { mean: f64, norm: f64 },

    #[error("velocity field is not discretely divergence-free (relative divergence {0:e})")]
    NotDivergenceFree(f64),

    #[error("simulation became unstable at step {step} (t = {t}): {reason}")]
    Unstable { step: usize, t: f64, reason: String },

    #[error("invariant violated at step {step}: {what}")]
    Invariant { step: usize, what: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("refusing to overwrite existing file {0} (pass --overwrite)")]
    WouldOverwrite(std::path::PathBuf),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
