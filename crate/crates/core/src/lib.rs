//! Exact combinatorics, determinantal kernels, ring dynamics and asymptotics
//! for the bead model on the semi-discrete torus `[0,1) x Z_n`.
//!
//! The crate is organised bottom-up:
//!
//! * [`torus`] holds bead configurations, interlacing, occupation paths and tilt.
//! * [`volumes`] evaluates the exact volume formula, its centered and
//!   complementary variants, and the partition function.
//! * [`fredholm`] and [`kernels`] cover the determinant product, the torus and
//!   ring correlation kernels, and the operator identities behind them.
//! * [`dynamics`] implements the Vandermonde functional, the non-colliding
//!   walk and TASEP on the ring, and their cross-checks.
//! * [`asymptotics`] evaluates the free energy and fine constant and probes
//!   convergence from exact volumes.
//! * [`mc`] provides brute-force Monte Carlo oracles.
//! * [`verify`] bundles the invariant suites used by the CLI.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod budget;
pub mod dynamics;
pub mod error;
pub mod fredholm;
pub mod kernels;
pub mod linalg;
pub mod logcomplex;
pub mod mc;
pub mod progress;
pub mod ringset;
pub mod roots;
pub mod torus;
pub mod verify;
pub mod volumes;

pub use error::{BeadError, Result};
pub use logcomplex::LogComplex;
pub use num_complex::Complex64;
pub use ringset::RingSet;
