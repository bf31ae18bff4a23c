use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("divergent integral: exponent {name} = {value} is not below 1")]
    Divergent { name: &'static str, value: f64 },
    #[error("non-finite values: {0}")]
    NonFinite(String),
    #[error("iteration diverged after {iterations} iterations (last distance {distance:e})")]
    Diverged { iterations: usize, distance: f64 },
    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    /// True for failures caused by bad input rather than by the numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidGrid(_)
                | Error::ShapeMismatch(_)
                | Error::InvalidArgument(_)
                | Error::Divergent { .. }
                | Error::Config(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
