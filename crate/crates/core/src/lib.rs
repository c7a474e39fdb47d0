//! Numerical toolkit for fragmented Bose–Einstein condensates.
//!
//! The crate is organised around five layers:
//!
//! - [`fock`]: exact finite-dimensional many-body states (dense first-quantized
//!   tensors and sparse occupation-number vectors), partial traces and
//!   density-matrix metrics. Everything else is checked against it.
//! - [`marginals`]: closed-form reduced marginals of exactly fragmented,
//!   phase-averaged and incoherent states, their combinatorial coefficients and
//!   the trace-distance bounds between them. Works at arbitrarily large `N`.
//! - [`hartree`]: the ν-scaled trapped Hartree equation, on a Fourier grid and
//!   in a truncated harmonic-oscillator basis, plus conserved-quantity diagnostics.
//! - [`infinite_gap`]: the two-level κ-system of the infinite-gap limit and the
//!   phase-averaged mean-field marginals at finite gap.
//! - [`manybody`]: exact propagation of the mode-truncated N-body Hamiltonian and
//!   the N-convergence sweep against the mean-field marginals.
//!
//! [`stats`] holds the log-log rate fit shared by the experiments.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fock;
pub mod hartree;
pub mod infinite_gap;
pub mod manybody;
pub mod marginals;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
