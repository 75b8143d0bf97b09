//! Default tolerances shared by the closed forms, the matrix oracle and the
//! classifiers.

/// Absolute threshold below which a function value counts as zero when
/// computing supports.
pub const SUPPORT: f64 = 1e-9;

/// Operator-norm comparison tolerance, applied as `COMPARE * (1 + scale)`.
pub const COMPARE: f64 = 1e-8;

/// Minimum-eigenvalue slack for positivity tests, scaled by `1 + spectral radius`.
pub const PSD: f64 = 1e-8;

/// Singular values below `RANK * largest` are treated as kernel directions.
pub const RANK: f64 = 1e-10;

/// Eigenvalues of a positive semidefinite matrix below `EIG_FLOOR * largest`
/// are rounded to zero before fractional powers are taken.
pub const EIG_FLOOR: f64 = 1e-12;

/// Matching tolerance for non-Hermitian eigenvalue multisets.
pub const EIG_MATCH: f64 = 1e-7;

/// Largest power used by the normaloid oracle.
pub const MAX_POWER: usize = 8;

/// `diff <= tol * (1 + scale)`: absolute plus relative comparison.
#[inline]
pub fn close(diff: f64, scale: f64, tol: f64) -> bool {
    diff <= tol * (1.0 + scale)
}
