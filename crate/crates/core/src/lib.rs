//! Spectral laboratory for the two-power nonlocal Schrödinger family
//! `i u_t + L u = a |u|^alpha u + b E(|u|^gamma) u` on periodic grids.
//!
//! Propagators and multipliers live in [`spectral`], weak-`L^p` machinery in
//! [`lorentz`], exponent arithmetic in [`params`], the Picard solver in
//! [`duhamel`], the splitting oracle in [`reference`] and the numerical
//! experiments in [`experiments`].

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod duhamel;
pub mod error;
pub mod experiments;
pub mod fft;
pub mod grid;
pub mod lorentz;
pub mod params;
pub mod reference;
pub mod smooth;
pub mod spectral;

pub use duhamel::{Model, SolutionTrace};
pub use error::{Error, Result};
pub use grid::{Field, Grid};
pub use num_complex::Complex64;
pub use params::{DerivedParams, ModelConfig};
pub use spectral::{DispersionSymbol, MultiplierSpec};
