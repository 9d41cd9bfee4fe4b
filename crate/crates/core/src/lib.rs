//! Gaussian multiplicative chaos on the line and on the circle.
//!
//! The crate realizes log-correlated Gaussian fields from their closed-form
//! covariance kernels ([`logfield`]), exponentiates them into GMC measures
//! ([`gmc`]), inverts those measures ([`inverse`]) and runs Monte Carlo
//! checks of their distributional laws ([`stattest`], [`experiments`]).
//!
//! ```
//! use chaoslab_core::gmc::build_measure;
//! use chaoslab_core::inverse::QuantilePath;
//! use chaoslab_core::logfield::{FieldSampler, FieldSpec, Grid};
//!
//! let spec = FieldSpec::line(0.5, 1.0, 1.0 / 256.0)?;
//! let grid = Grid::covering(&spec, 0.0, 2.0)?;
//! let sampler = FieldSampler::new(spec, grid)?;
//! let eta = build_measure(&sampler.sample(7, 0));
//! let q = QuantilePath::new(&eta);
//! let t = q.q(0.5)?;
//! assert!((eta.cumulative_at(t)? - 0.5).abs() < 1e-12);
//! # Ok::<(), chaoslab_core::Error>(())
//! ```

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod gmc;
pub mod inverse;
pub mod logfield;
pub mod rng;
pub mod stattest;

pub use error::{Error, Result};
