//! Special functions and small dense linear algebra shared by the other modules.
//!
//! Everything here is pure and reentrant. The matrices that show up in this
//! crate are sub-intensity matrices of order ten or less, so the linear
//! algebra favours simplicity over asymptotic performance.

mod expi;
mod matrix;
mod quad;

pub use expi::{expi, expi_scaled};
pub use matrix::{mat_exp, solve, SquareMatrix};
pub use quad::{integrate, tail_of_sum, QuadratureSpec};

use thiserror::Error;

/// Errors produced by the special-function and quadrature routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("domain error in {context}: {detail}")]
    Domain {
        context: &'static str,
        detail: String,
    },
    #[error("overflow in {context}: {detail}")]
    Overflow {
        context: &'static str,
        detail: String,
    },
    #[error("matrix is singular (pivot {pivot:.3e} at column {column})")]
    Singular { pivot: f64, column: usize },
    #[error(
        "quadrature failed to converge within {max_subdivisions} subdivisions \
         (error estimate {error:.3e}, tolerance {tolerance:.3e})"
    )]
    QuadratureConvergence {
        max_subdivisions: usize,
        error: f64,
        tolerance: f64,
    },
}
