//! Weighted conditional expectation operators `T = M_w E M_u` on finite
//! measure spaces.
//!
//! The crate computes the closed forms for `‖T‖`, `(T*T)^p`, `(TT*)^p`, the
//! polar factors and the Aluthge transform, a dense matrix oracle to check
//! them against, membership tests for the partial normality classes, and
//! spectral data. It is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod classify;
pub mod condops;
mod error;
pub mod oracle;
pub mod space;
pub mod spectra;
pub mod tol;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use condops::{Side, WeightedCondOp};
pub use oracle::ComplexMatrix;
pub use space::{FiniteMeasureSpace, IndexSet, MeasurableFn, Partition};
