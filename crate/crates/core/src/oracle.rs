//! Dense complex matrix computations used as ground truth for the closed
//! forms.
//!
//! Matrices act on functions, i.e. on `ℂⁿ` carrying the μ-weighted inner
//! product `⟨f, g⟩ = Σ f(x) conj(g(x)) μ(x)`. With `D = diag(√μ)`, an operator
//! matrix `A` corresponds to the Euclidean matrix `D A D⁻¹`; adjoints,
//! positivity, singular values and norms are computed there and mapped back.

use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use nalgebra::linalg::{Schur, SymmetricEigen};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
#[allow(unused_imports)] // float math comes from std when it is linked, else from libm
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::space::FiniteMeasureSpace;
use crate::tol;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            inner: DMatrix::zeros(rows, cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: DMatrix::identity(n, n),
        }
    }

    pub fn diagonal(d: &[Complex64]) -> Self {
        Self {
            inner: DMatrix::from_diagonal(&DVector::from_column_slice(d)),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self {
            inner: DMatrix::from_fn(rows, cols, f),
        }
    }

    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Ok(Self {
            inner: DMatrix::from_row_slice(rows, cols, &entries),
        })
    }

    pub fn to_row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.inner[(i, j)]);
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.inner.is_square()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.inner[(i, j)]
    }

    pub fn apply(&self, f: &[Complex64]) -> Result<Vec<Complex64>> {
        if f.len() != self.cols() {
            return Err(Error::ShapeMismatch {
                expected: self.cols(),
                found: f.len(),
            });
        }
        Ok((&self.inner * DVector::from_column_slice(f))
            .iter()
            .copied()
            .collect())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            inner: &self.inner * s,
        }
    }

    /// Plain conjugate transpose (Euclidean adjoint).
    pub fn conjugate_transpose(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Column rank numerically, with singular values below `RANK * largest`
    /// treated as zero. Uses the Euclidean structure.
    pub fn rank(&self) -> usize {
        let sv = svd(&self.inner).values;
        let cut = tol::RANK * sv.first().copied().unwrap_or(0.0);
        sv.iter().filter(|&&s| s > cut).count()
    }

    pub(crate) fn from_dmatrix(inner: DMatrix<Complex64>) -> Self {
        Self { inner }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_dmatrix(&self.inner * &rhs.inner)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_dmatrix(&self.inner + &rhs.inner)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::from_dmatrix(&self.inner - &rhs.inner)
    }
}

/// Eigen-decomposition of a μ-self-adjoint matrix. `vectors` has the
/// eigenfunctions as columns, orthonormal in the μ-inner product.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// Polar factors `A = U P`.
#[derive(Debug, Clone)]
pub struct Polar {
    pub isometry: ComplexMatrix,
    pub abs: ComplexMatrix,
}

fn check_operator(a: &ComplexMatrix, space: &FiniteMeasureSpace) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if a.rows() != space.len() {
        return Err(Error::ShapeMismatch {
            expected: space.len(),
            found: a.rows(),
        });
    }
    Ok(())
}

fn sqrt_mass(space: &FiniteMeasureSpace) -> Vec<f64> {
    space.mass().iter().map(|m| m.sqrt()).collect()
}

/// `D A D⁻¹`.
fn to_euclidean(a: &ComplexMatrix, space: &FiniteMeasureSpace) -> DMatrix<Complex64> {
    let d = sqrt_mass(space);
    DMatrix::from_fn(a.rows(), a.cols(), |i, j| a.inner[(i, j)] * (d[i] / d[j]))
}

/// `D⁻¹ B D`.
fn from_euclidean(b: &DMatrix<Complex64>, space: &FiniteMeasureSpace) -> ComplexMatrix {
    let d = sqrt_mass(space);
    ComplexMatrix::from_fn(b.nrows(), b.ncols(), |i, j| b[(i, j)] * (d[j] / d[i]))
}

/// Adjoint with respect to the μ-inner product: `⟨Af, g⟩ = ⟨f, A*g⟩`.
pub fn weighted_adjoint(a: &ComplexMatrix, space: &FiniteMeasureSpace) -> Result<ComplexMatrix> {
    check_operator(a, space)?;
    let m = space.mass();
    Ok(ComplexMatrix::from_fn(a.rows(), a.cols(), |i, j| {
        a.inner[(j, i)].conj() * (m[j] / m[i])
    }))
}

fn hermitian_part(b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (b + b.adjoint()) * Complex64::new(0.5, 0.0)
}

fn sorted_eig(b: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let eig = SymmetricEigen::new(hermitian_part(b));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(b.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    (values, vectors)
}

/// Eigenvalues ascending with μ-orthonormal eigenfunctions. The input is
/// symmetrized in the μ-inner product first.
pub fn hermitian_eig(a: &ComplexMatrix, space: &FiniteMeasureSpace) -> Result<HermitianEig> {
    check_operator(a, space)?;
    let (values, vectors) = sorted_eig(&to_euclidean(a, space));
    let d = sqrt_mass(space);
    let vectors = ComplexMatrix::from_fn(vectors.nrows(), vectors.ncols(), |i, j| {
        vectors[(i, j)] / d[i]
    });
    Ok(HermitianEig { values, vectors })
}

/// Diagnostics of a positivity test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdMargin {
    /// `‖B − B^H‖` of the Euclidean form.
    pub hermitian_defect: f64,
    pub min_eigenvalue: f64,
    pub spectral_radius: f64,
}

impl PsdMargin {
    pub fn is_psd(&self, tol: f64) -> bool {
        self.is_psd_scaled(tol, 0.0)
    }

    /// Like [`is_psd`](Self::is_psd) with the slack measured against
    /// `max(ρ, scale)`. A difference of two nearly equal operators of size
    /// `scale` carries rounding of that size even when `ρ` itself is small.
    pub fn is_psd_scaled(&self, tol: f64, scale: f64) -> bool {
        let slack = tol * (1.0 + self.spectral_radius.max(scale));
        self.hermitian_defect <= slack && self.min_eigenvalue >= -slack
    }
}

pub fn psd_margin(a: &ComplexMatrix, space: &FiniteMeasureSpace) -> Result<PsdMargin> {
    check_operator(a, space)?;
    let b = to_euclidean(a, space);
    let hermitian_defect = euclidean_norm(&(&b - b.adjoint()));
    let (values, _) = sorted_eig(&b);
    let min_eigenvalue = values.first().copied().unwrap_or(0.0);
    let spectral_radius = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    Ok(PsdMargin {
        hermitian_defect,
        min_eigenvalue,
        spectral_radius,
    })
}

/// Hermitian in the μ-inner product and `λ_min ≥ −tol (1 + max |λ|)`.
pub fn is_psd(a: &ComplexMatrix, space: &FiniteMeasureSpace, tol: f64) -> Result<bool> {
    Ok(psd_margin(a, space)?.is_psd(tol))
}

fn power_from_eig(values: &[f64], vectors: &DMatrix<Complex64>, p: f64) -> DMatrix<Complex64> {
    let top = values.iter().copied().fold(0.0, f64::max);
    let floor = tol::EIG_FLOOR * top;
    let powered: Vec<Complex64> = values
        .iter()
        .map(|&l| {
            if l <= floor {
                Complex64::zero()
            } else {
                Complex64::new(l.powf(p), 0.0)
            }
        })
        .collect();
    let scaled = DMatrix::from_fn(vectors.nrows(), vectors.ncols(), |i, j| {
        vectors[(i, j)] * powered[j]
    });
    &scaled * vectors.adjoint()
}

/// Spectral power of a positive semidefinite operator. Eigenvalues at or
/// below `EIG_FLOOR * λ_max` (including negative rounding noise) are mapped
/// to zero.
pub fn frac_power_psd(
    a: &ComplexMatrix,
    space: &FiniteMeasureSpace,
    p: f64,
) -> Result<ComplexMatrix> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(p));
    }
    let margin = psd_margin(a, space)?;
    if !margin.is_psd(tol::PSD) {
        return Err(Error::NotPsd {
            min_eigenvalue: margin.min_eigenvalue,
        });
    }
    let (values, vectors) = sorted_eig(&to_euclidean(a, space));
    Ok(from_euclidean(&power_from_eig(&values, &vectors, p), space))
}

/// `σ_max` as the square root of the top eigenvalue of `BᴴB`.
fn euclidean_norm(b: &DMatrix<Complex64>) -> f64 {
    if b.is_empty() {
        return 0.0;
    }
    let eig = SymmetricEigen::new(hermitian_part(&(b.adjoint() * b)));
    eig.eigenvalues.iter().copied().fold(0.0, f64::max).sqrt()
}

struct EuclideanSvd {
    left: DMatrix<Complex64>,
    /// Descending.
    values: Vec<f64>,
    right_adjoint: DMatrix<Complex64>,
}

/// Singular triplets of a square `B` from the Hermitian eigenproblem of
/// `[[0, B], [Bᴴ, 0]]`, whose eigenpairs are `±σᵢ` and `(wᵢ, ±vᵢ)/√2`.
/// The `n` largest eigenvalues are the singular values; vectors belonging
/// to (numerically) zero singular values are arbitrary and must not be used.
fn svd(b: &DMatrix<Complex64>) -> EuclideanSvd {
    let n = b.nrows();
    let h = DMatrix::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
        (true, false) => b[(i, j - n)],
        (false, true) => b[(j, i - n)].conj(),
        _ => Complex64::zero(),
    });
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let mut left = DMatrix::<Complex64>::zeros(n, n);
    let mut right_adjoint = DMatrix::<Complex64>::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (k, &col) in order.iter().take(n).enumerate() {
        values.push(eig.eigenvalues[col].max(0.0));
        let x = eig.eigenvectors.column(col);
        let (w, v) = (x.rows(0, n), x.rows(n, n));
        let (wn, vn) = (w.norm(), v.norm());
        for i in 0..n {
            left[(i, k)] = if wn > 0.0 {
                w[i] / wn
            } else {
                Complex64::zero()
            };
            right_adjoint[(k, i)] = if vn > 0.0 {
                (v[i] / vn).conj()
            } else {
                Complex64::zero()
            };
        }
    }
    EuclideanSvd {
        left,
        values,
        right_adjoint,
    }
}

/// Polar decomposition via the SVD `B = W Σ Vᴴ` of the Euclidean form:
/// `P = V Σ Vᴴ` and `U = Σ_{σᵢ > cut} wᵢ vᵢᴴ` with `cut = rank_tol · σ_max`,
/// so that `ker U = ker P`.
pub fn polar(a: &ComplexMatrix, space: &FiniteMeasureSpace, rank_tol: f64) -> Result<Polar> {
    check_operator(a, space)?;
    if rank_tol.is_nan() || rank_tol < 0.0 {
        return Err(Error::InvalidTolerance(rank_tol));
    }
    let n = a.rows();
    let s = svd(&to_euclidean(a, space));
    let top = s.values.iter().copied().fold(0.0, f64::max);
    let cut = rank_tol * top;
    let mut abs = DMatrix::<Complex64>::zeros(n, n);
    let mut iso = DMatrix::<Complex64>::zeros(n, n);
    for (k, &sigma) in s.values.iter().enumerate() {
        if sigma <= cut || sigma == 0.0 {
            continue;
        }
        let v = s.right_adjoint.row(k).adjoint();
        let vh = s.right_adjoint.row(k);
        abs += &v * vh * Complex64::new(sigma, 0.0);
        iso += s.left.column(k) * vh;
    }
    Ok(Polar {
        isometry: from_euclidean(&iso, space),
        abs: from_euclidean(&abs, space),
    })
}

/// `Â = |A|^{1/2} U |A|^{1/2}`.
pub fn aluthge(a: &ComplexMatrix, space: &FiniteMeasureSpace) -> Result<ComplexMatrix> {
    let pol = polar(a, space, tol::RANK)?;
    let half = frac_power_psd(&pol.abs, space, 0.5)?;
    Ok(&(&half * &pol.isometry) * &half)
}

/// Largest singular value in the μ-inner product.
pub fn op_norm(a: &ComplexMatrix, space: &FiniteMeasureSpace) -> Result<f64> {
    check_operator(a, space)?;
    Ok(euclidean_norm(&to_euclidean(a, space)))
}

/// Singular values in the μ-inner product, descending.
pub fn singular_values(a: &ComplexMatrix, space: &FiniteMeasureSpace) -> Result<Vec<f64>> {
    check_operator(a, space)?;
    Ok(svd(&to_euclidean(a, space)).values)
}

/// Smallest singular value of the stacked operator `[top; bottom]`, i.e.
/// `min_{‖f‖=1} (‖top f‖² + ‖bottom f‖²)^{1/2}`, in the μ-inner product.
pub fn stacked_min_singular_value(
    top: &ComplexMatrix,
    bottom: &ComplexMatrix,
    space: &FiniteMeasureSpace,
) -> Result<f64> {
    check_operator(top, space)?;
    check_operator(bottom, space)?;
    let n = space.len();
    let t = to_euclidean(top, space);
    let b = to_euclidean(bottom, space);
    let stacked = DMatrix::from_fn(
        2 * n,
        n,
        |i, j| if i < n { t[(i, j)] } else { b[(i - n, j)] },
    );
    // σ([T; B]) = σ(R) for the QR factor R
    let r = stacked.qr().r();
    Ok(svd(&r).values.last().copied().unwrap_or(0.0))
}

/// True when every kernel direction of `a` (singular value at most
/// `RANK * σ_max`) is mapped by `b` to a vector of norm at most
/// `tol (1 + ‖b‖)`.
pub fn kernel_subset(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    space: &FiniteMeasureSpace,
    tol: f64,
) -> Result<bool> {
    Ok(kernel_leak(a, b, space)? <= tol * (1.0 + op_norm(b, space)?))
}

/// `‖b Π‖` with `Π` the orthogonal projection onto the numerical kernel of
/// `a` (singular values at most `RANK * σ_max`); 0 when `a` is injective.
pub fn kernel_leak(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    space: &FiniteMeasureSpace,
) -> Result<f64> {
    check_operator(a, space)?;
    check_operator(b, space)?;
    let n = a.rows();
    let s = svd(&to_euclidean(a, space));
    let cut = tol::RANK * s.values.first().copied().unwrap_or(0.0);
    let mut kernel = DMatrix::<Complex64>::identity(n, n);
    for (k, &sigma) in s.values.iter().enumerate() {
        if sigma > cut && sigma > 0.0 {
            let vh = s.right_adjoint.row(k);
            kernel -= vh.adjoint() * vh;
        }
    }
    Ok(euclidean_norm(&(to_euclidean(b, space) * kernel)))
}

pub fn matrix_power(a: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if n == 0 {
        return Err(Error::InvalidPowerCount(n));
    }
    let mut acc = a.clone();
    for _ in 1..n {
        acc = &acc * a;
    }
    Ok(acc)
}

/// Eigenvalues of a general square matrix via the complex Schur form.
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<Complex64>> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let schur = Schur::try_new(a.inner.clone(), f64::EPSILON, 1000 * (n + 1))
        .ok_or(Error::NoConvergence)?;
    let (_, t) = schur.unpack();
    Ok((0..n).map(|i| t[(i, i)]).collect())
}
