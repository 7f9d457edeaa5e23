use thiserror::Error;

/// Errors raised anywhere in the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("linear solve failed: {message} (relative residual {residual:.3e})")]
    Solve { message: String, residual: f64 },

    #[error("eigensolver did not converge after {iterations} cycles; best residuals {residuals:?}")]
    Eigen { iterations: usize, residuals: Vec<f64> },

    #[error("angular momentum window [{lo}, {hi}] too small: minimum found at m = {m_star}")]
    Window { lo: i64, hi: i64, m_star: i64 },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("at B = {b}: {source}")]
    AtField { b: f64, source: Box<Error> },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
