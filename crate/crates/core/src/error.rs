use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("quadrature level must be at least 4, got {0}")]
    LevelTooLow(usize),

    #[error("integrand is not finite at node {index} (value {value})")]
    NonFiniteIntegrand { index: usize, value: f64 },

    #[error("perturbation is invalid: {0}")]
    InvalidPerturbation(String),

    #[error("order {order} exceeds the supported maximum {max}")]
    OrderTooLarge { order: usize, max: usize },

    #[error("closed form requires Hopf-shaped metrics (a0 = a1 and a2 = a3): {0}")]
    NotHopfShaped(String),

    #[error("invalid sweep grid: {0}")]
    InvalidGrid(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
