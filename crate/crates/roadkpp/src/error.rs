use thiserror::Error;

/// Errors produced by the solver and analysis layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("root bracketing failed for {what}: h({lo}) = {flo:e}, h({hi}) = {fhi:e}")]
    BracketFailure {
        what: &'static str,
        lo: f64,
        hi: f64,
        flo: f64,
        fhi: f64,
    },

    #[error("grid error: {0}")]
    Grid(String),

    #[error("spectral operator requires a power-of-two point count, got {0}")]
    NotPowerOfTwo(usize),

    #[error("iteration did not converge: {0}")]
    NoConvergence(String),

    #[error("quadrature refused: {0}")]
    Quadrature(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
