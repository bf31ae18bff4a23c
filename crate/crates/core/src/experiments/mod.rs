//! Numerical experiments: decay-rate fits, scattering, self-similarity,
//! stability and fractional Leibniz ratios.

pub mod config;
pub mod data;
pub mod dispersive;
pub mod fit;
pub mod leibniz;
pub mod report;
pub mod scattering;
pub mod selfsim;
pub mod stability;

pub use config::ExperimentConfig;
pub use report::{Check, ExperimentOutput};
