//! Finite-difference nonlinear Schrödinger equation on the periodic lattice
//! `T_h^d = hZ^d / 2πZ^d` with `h = π/M`.
//!
//! The crate is organised bottom-up:
//!
//! * [`lattice`] – the lattice, grid functions, Lebesgue norms, finite
//!   differences, cell-average discretization and per-cell affine interpolation.
//! * [`spectral`] – the lattice Fourier pair, Fourier multipliers, the discrete
//!   Laplacian symbol, Littlewood–Paley projections and Sobolev norms.
//! * [`dynamics`] – the exact linear propagator, Strang / RK4 / Duhamel–Picard
//!   integrators, conserved quantities and the fine-grid continuum reference solver.
//! * [`estimates`] – measured-constant sweeps for the dispersive kernel,
//!   oscillatory integrals and Strichartz norms.
//! * [`harness`] – continuum-limit convergence studies, rate fits and
//!   result persistence.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod estimates;
pub mod harness;
pub mod lattice;
pub mod spectral;

pub use error::{LnlsError, Result};
pub use num_complex::Complex64;
