//! Crate-wide error type.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("spectral density is only available for the exponential-cosine family")]
    UnsupportedFamily,

    #[error("initial-state mass underflow: P(X(0) < S(0) - eps) = {mass:.3e} < 1e-12")]
    InitialMassUnderflow { mass: f64 },

    #[error(
        "circulant embedding failed after {doublings} doublings \
         (size {size}, relative clipped mass {clipped_mass:.3e} > 1e-6)"
    )]
    EmbeddingFailed {
        size: usize,
        doublings: u32,
        clipped_mass: f64,
    },

    #[error("path {path_index} starts at {value} on or above the boundary S(0) = {boundary}")]
    StartAboveBoundary {
        path_index: usize,
        value: f64,
        boundary: f64,
    },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("Volterra recursion diverged at t = {t} (|g| = {value:.3e} > 1e3); reduce the step")]
    Instability { t: f64, value: f64 },

    #[error("Gauss-Markov factorization invalid: D = {d:.3e} <= 0 at (t = {t}, tau = {tau})")]
    FactorizationDomain { t: f64, tau: f64, d: f64 },

    #[error(
        "insufficient support for the exponential fit: need {needed} past the window start, have {available}"
    )]
    InsufficientSupport { needed: f64, available: f64 },

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("estimates have disjoint supports; nothing to compare")]
    DisjointSupport,

    #[error("missing file: {0}")]
    MissingFile(PathBuf),

    #[error("malformed CSV {path}: {message}")]
    MalformedCsv { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: 1 for config/usage errors, 2 for
    /// numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. }
            | Error::MissingFile(_)
            | Error::MalformedCsv { .. }
            | Error::Io(_) => 1,
            _ => 2,
        }
    }
}
