use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid operator parameters: {0}")]
    InvalidParams(String),

    #[error("no finite fixed point (a = 1)")]
    NoFixedPoint,

    #[error("spectrum undefined: {0}")]
    Unbounded(String),

    #[error("invalid truncation dimension {0}")]
    InvalidDimension(usize),

    #[error("power iteration hit the cap of {iterations} steps (estimate {estimate}, residual {residual})")]
    IterationCap {
        iterations: usize,
        estimate: f64,
        residual: f64,
    },

    #[error("lambda in spectrum of truncation (lambda = {0})")]
    SingularResolvent(Complex64),

    #[error("not the normalized-translation family: {0}")]
    WrongFamily(String),

    #[error("invalid scan grid: {0}")]
    InvalidGrid(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
