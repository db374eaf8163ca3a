//! Numerical machinery for Fourier series built on Riemann–Stieltjes integration.
//!
//! The crate is organised bottom-up:
//!
//! - [`funcmodel`]: piecewise closed-form functions with explicit breakpoints,
//!   one-sided limits and jumps, plus the text catalog format.
//! - [`stieltjes`]: Riemann–Stieltjes integrals against step and piecewise-smooth
//!   integrators, integration by parts and the generalized Euler summation formula.
//! - [`kernels`]: the sawtooth `ψ(u) = u − ⌊u⌋ − 1/2`, its truncated and Cesàro
//!   forms, and the arithmetic-progression subseries kernels `ψ(u, r, q)`.
//! - [`fourier`]: coefficients on arbitrary intervals, partial sums, Cesàro means,
//!   the midpoint identities and local one-sided series.
//! - [`finiteseries`]: finite Fourier series modulo `q` at rational points.

// `!(a < b)` is used on purpose so NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod finiteseries;
pub mod fourier;
pub mod funcmodel;
pub mod kernels;
pub mod stieltjes;

pub use error::{Error, Result};
pub use num_complex::Complex64;
