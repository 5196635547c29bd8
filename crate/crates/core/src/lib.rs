//! Critical-orbit spectra of rational maps and the summability, measure,
//! potential and transfer-operator machinery built on them.

// `!(x < y)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
mod floats;
pub mod measures;
pub mod orbit;
pub mod potential;
pub mod riemann;
pub mod ruelle;
pub mod summability;

pub use error::{Error, Result};
pub use num_complex::Complex64;
