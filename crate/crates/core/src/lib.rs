//! Numerical laboratory for the half-Laplacian `(-Delta)^{1/2}` on periodic
//! boxes in one and two dimensions: spectral and singular-integral
//! operators, the harmonic extension to the upper half-space, the Kelvin
//! transform, decay fits, and unique-continuation experiments.

// `!(x > 0.0)` is used on purpose so that NaN is rejected with the bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod cli;
pub mod config;
pub mod decay;
pub mod diagnostics;
pub mod error;
pub mod extension;
pub mod family;
mod fft;
pub mod field;
pub mod fractional;
pub mod io;
pub mod kelvin;
pub mod landis;

pub use diagnostics::{Diagnosed, Warning};
pub use error::{Error, Result};
pub use field::{Grid, SampledField, SpectralField};
