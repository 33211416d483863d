//! Functions on an interval as Chebyshev series, and quasi-matrices whose
//! columns are such functions.

pub mod cheb;
mod fun;
mod quasimatrix;

pub use fun::{inner_product, Fun, Interval, DEFAULT_TOL, MAX_POINTS};
pub use quasimatrix::{QuasiMatrix, Tsvd};
