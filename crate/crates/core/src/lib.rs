//! Iterative Filtering signal decomposition.
//!
//! Splits a sampled, 1-periodic signal into Intrinsic Mode Functions (IMFs)
//! plus a trend. Five inner-loop engines are provided:
//!
//! - **IF / FIF**: constant filter length, circulant operator, FFT inner loop.
//! - **ALIF**: position-dependent stretched filter, dense operator.
//! - **SALIF**: ALIF with the symmetrized, always contractive operator `I - s⁻²KᵀK`.
//! - **FRIF**: resample time so the target component is quasi-stationary,
//!   run FIF, then warp back.
//! - **Dense RIF**: the resampled operator expressed directly on the original
//!   grid, without interpolation.
//!
//! The [`decompose`](engine::decompose) driver runs the outer extraction loop
//! for any of them.

pub mod cli;
pub mod dense;
pub mod engine;
pub mod error;
pub mod fast;
pub mod filter;
pub mod resample;
pub mod sift;
pub mod signal;
pub mod spline;
pub mod synthetic;

pub use error::{Error, Result};
pub use signal::{Signal, StoppingConfig};
