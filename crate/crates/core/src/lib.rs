//! Contour-integral eigensolvers for differential eigenvalue problems.
//!
//! Functions are adaptive Chebyshev interpolants ([`Fun`]) and operators are
//! symbolic linear ordinary differential operators ([`DiffOp`]). Nothing is
//! discretized into a fixed matrix eigenproblem: every resolvent application
//! is an adaptively resolved boundary-value solve, and the eigensolvers work on
//! quasi-matrices of functions.
//!
//! The four drivers live in [`solvers`]:
//!
//! - [`solvers::cont_feast`]: zeroth-moment subspace iteration with Rayleigh–Ritz,
//! - [`solvers::cont_ss_rr`]: higher-order moments with Rayleigh–Ritz,
//! - [`solvers::cont_ss_hankel`]: block Hankel pencil of reduced moments,
//! - [`solvers::cont_ss_caa`]: block communication-avoiding Arnoldi.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::len_without_is_empty)]

pub mod contour;
pub mod densela;
pub mod diffop;
pub mod error;
pub mod funspace;
pub mod problems;
pub mod solvers;

pub use contour::{Contour, ContourKind, MomentSet};
pub use diffop::{BoundaryConditions, DiffEigProblem, DiffOp};
pub use error::{Error, Result};
pub use funspace::{Fun, Interval, QuasiMatrix};
pub use num_complex::Complex64;
pub use solvers::{EigPair, EigResult, Method, SolverConfig};
