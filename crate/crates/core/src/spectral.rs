//! Spectrum of −Δ with respect to the μ-weighted inner product.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Real;

const EIGEN_TOL: f64 = 1e-12;
const EIGEN_MAX_ITER: usize = 10_000;
/// Eigenvalues below this are taken to be exactly zero.
pub const KERNEL_SNAP: f64 = 1e-10;

/// Eigenvalues of −Δ sorted ascending, λ₀ ≤ λ₁ ≤ … ≤ λ_{m−1}.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Spectrum<T: Real> {
    pub eigenvalues: Vec<T>,
}

impl<T: Real> Spectrum<T> {
    /// λ₁, absent for a single vertex.
    pub fn gap(&self) -> Option<T> {
        self.eigenvalues.get(1).copied()
    }
}

/// `diag(μ)^{-1/2} L diag(μ)^{-1/2}`, symmetric and similar to −Δ.
pub fn conjugated_laplacian<T: Real>(g: &Graph<T>) -> DMatrix<T> {
    let l = g.combinatorial_laplacian();
    let s: Vec<T> = g.measure().iter().map(|mu| T::one() / mu.sqrt()).collect();
    DMatrix::from_fn(g.m(), g.m(), |i, j| s[i] * l[(i, j)] * s[j])
}

/// Eigen-decomposition of a symmetric matrix, eigenvalues sorted ascending
/// with their eigenvectors as matching columns.
pub(crate) fn sorted_symmetric_eigen<T: Real>(a: DMatrix<T>) -> Result<(Vec<T>, DMatrix<T>)> {
    let n = a.nrows();
    let eig = SymmetricEigen::try_new(a, T::lit(EIGEN_TOL).max(T::EPS), EIGEN_MAX_ITER)
        .ok_or(Error::EigenFailure)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

pub fn spectrum<T: Real>(g: &Graph<T>) -> Result<Spectrum<T>> {
    let (mut values, _) = sorted_symmetric_eigen(conjugated_laplacian(g))?;
    let snap = T::lit(KERNEL_SNAP);
    for v in values.iter_mut() {
        if v.abs() < snap {
            *v = T::zero();
        }
    }
    Ok(Spectrum { eigenvalues: values })
}

/// λ₁ = inf { ∫|∇u|² : ū = 0, ∫u² = 1 }, the second-smallest eigenvalue.
pub fn poincare_constant<T: Real>(g: &Graph<T>) -> Result<T> {
    spectrum(g)?.gap().ok_or(Error::NoSpectralGap)
}

/// Eigenfunction of −Δ for the eigenvalue with the given index, normalized
/// so that ∫ φ² dμ = 1.
pub fn eigenfunction<T: Real>(g: &Graph<T>, k: usize) -> Result<DVector<T>> {
    let (_, vectors) = sorted_symmetric_eigen(conjugated_laplacian(g))?;
    if k >= g.m() {
        return Err(Error::DimensionMismatch { expected: g.m(), got: k + 1 });
    }
    // Undo the conjugation: φ = diag(μ)^{-1/2} ψ.
    Ok(DVector::from_fn(g.m(), |i, _| vectors[(i, k)] / g.measure()[i].sqrt()))
}

/// Sign of `det(a)` for symmetric `a`, from the parity of negative
/// eigenvalues. Returns 0 when `|det a| < 1e-10 · scaleᵐ` with
/// `scale = max(1, max |eigenvalue|)`.
pub fn symmetric_det_sign<T: Real>(a: DMatrix<T>) -> Result<i32> {
    let (values, _) = sorted_symmetric_eigen(a)?;
    let scale = values.iter().fold(T::one(), |acc, v| acc.max(v.abs()));
    let mut log_ratio = T::zero();
    let mut negatives = 0;
    for &v in &values {
        if v == T::zero() {
            return Ok(0);
        }
        if v < T::zero() {
            negatives += 1;
        }
        log_ratio += (v.abs() / scale).ln();
    }
    // |det| / scaleᵐ compared in log space to avoid underflow for larger m.
    if log_ratio < T::lit(1e-10).ln() {
        return Ok(0);
    }
    Ok(if negatives % 2 == 0 { 1 } else { -1 })
}
