use thiserror::Error;

/// Errors produced by data-dependent failures.
///
/// Shape/dimension misuse panics instead; those are programming errors, not
/// properties of the input data.
#[derive(Debug, Error)]
pub enum Error {
    #[error("time {t} lies outside the control interval [0, {t_final}]")]
    TimeOutOfRange { t: f64, t_final: f64 },

    #[error("sampled control grid too coarse: {m} points (need at least 3)")]
    GridTooCoarse { m: usize },

    #[error("evaluation time {t} is not a grid point of the sampled control")]
    OffGridTime { t: f64 },

    #[error("Gram matrix is not positive definite; spectral data is inconsistent")]
    SingularGram,

    #[error("root search for eigenvalue {index} did not converge")]
    RootNotConverged { index: usize },

    #[error("operator has numerical rank {found}, expected {expected}")]
    RankMismatch { found: usize, expected: usize },

    #[error("Krein recursion hit a non-positive pivot {value:.3e} at step {step}; \
             data is inconsistent or too noisy")]
    IllPosed { step: usize, value: f64 },

    #[error("quadrature reached {achieved:.3e}, requested {requested:.3e}")]
    QuadratureTolerance { achieved: f64, requested: f64 },

    #[error("response samples must form a uniform grid on [0, 2T] with an odd \
             number of points: {reason}")]
    BadResponseGrid { reason: String },

    #[error("invalid Jacobi matrix: {reason}")]
    InvalidMatrix { reason: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed input file: {reason}")]
    MalformedFile { reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
