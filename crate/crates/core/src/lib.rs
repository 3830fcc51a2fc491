//! Fractional linear multistep methods (FLMMs) for Caputo initial value problems
//! of order `0 < β ≤ 1`.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! - [`series`]: truncated power-series arithmetic (Grünwald weights, binomial
//!   series, Cauchy products, reciprocals, Miller's power recurrence),
//! - [`methods`]: the method catalogue (NFLMM2, GL1, FBDF2, FAM1, FT2), weight
//!   generation and generating-function order checks,
//! - [`solver`]: fixed-step time stepping for linear and nonlinear problems,
//! - [`stability`]: boundary-locus curves, A-stability checks and region
//!   membership.
//!
//! ```
//! use flmm_core::{methods::Method, series, FractionalOrder};
//!
//! let beta = FractionalOrder::new(1.0).unwrap();
//! let w = Method::Nflmm2.weights(beta, 4).unwrap();
//! assert_eq!(w.a.as_slice(), &[1.5, -2.0, 0.5, 0.0, 0.0]);
//! let g = series::grunwald_weights(FractionalOrder::new(0.5).unwrap(), 2);
//! assert_eq!(g.as_slice(), &[1.0, -0.5, -0.125]);
//! ```
#![cfg_attr(not(test), no_std)]

extern crate alloc;

mod error;
mod order;

pub mod methods;
pub mod series;
pub mod solver;
pub mod stability;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use order::FractionalOrder;
