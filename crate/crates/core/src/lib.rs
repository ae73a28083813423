//! Hartley–Bessel transform toolkit: special functions, quadrature, the
//! discrete transform, generalized convolution and an integral-equation solver.

// `!(x >= 0.0)` style guards are deliberate: they reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod cli;
pub mod convolution;
pub mod error;
pub mod io;
pub mod quadrature;
pub mod solver;
pub mod special_functions;
pub mod transform;

pub use error::{Error, Result};
