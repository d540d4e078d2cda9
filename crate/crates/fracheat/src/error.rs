use thiserror::Error;

/// Errors shared by the whole crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("incompatible grids: {0}")]
    GridMismatch(String),
    #[error("invalid norm spec: {0}")]
    InvalidNormSpec(String),
    #[error("inadmissible time t={t}: estimated kernel mass outside radius {radius} is {leakage:.3e} (tolerance {tolerance:.3e})")]
    InadmissibleTime {
        t: f64,
        radius: f64,
        leakage: f64,
        tolerance: f64,
    },
    #[error("quadrature failed to converge: {0}")]
    QuadratureNonConvergence(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("fit error: {0}")]
    Fit(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
