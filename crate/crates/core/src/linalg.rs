//! Small dense complex kernels shared by the rate, geometry and selection code.
//!
//! Everything here works on `DMatrix<Complex64>`; the matrices that appear in
//! this crate are at most a handful of rows, so dynamic storage is fine.

use nalgebra::{Cholesky, DMatrix, Dyn, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// `m * m^H`.
pub fn gram(m: &CMatrix) -> CMatrix {
    m * m.adjoint()
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Largest entrywise deviation `|m - m^H|`.
pub fn hermitian_asymmetry(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of a Hermitian matrix, sorted in descending order.
pub fn hermitian_eigenvalues_desc(m: &CMatrix) -> Vec<f64> {
    let mut values: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

/// Full eigendecomposition of a Hermitian matrix with eigenpairs sorted by
/// descending eigenvalue. Column `i` of the returned matrix belongs to
/// `values[i]`.
pub fn hermitian_eigen_desc(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let SymmetricEigen {
        eigenvalues,
        eigenvectors,
    } = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eigenvalues[b].total_cmp(&eigenvalues[a]));
    let values = order.iter().map(|&i| eigenvalues[i]).collect();
    let vectors = eigenvectors.select_columns(order.iter());
    (values, vectors)
}

/// Cholesky factorization that also rejects non-positive pivots. nalgebra's
/// complex square root happily returns `i` for `-1`, so the pivots are
/// checked to be real and positive.
///
/// The input is Hermitized first (real diagonal, mirrored lower triangle),
/// which removes the rounding that products like `V^H A V` leave behind.
pub fn hpd_cholesky(m: &CMatrix) -> Option<Cholesky<Complex64, Dyn>> {
    let mut h = hermitian_part(m);
    for i in 0..h.nrows() {
        h[(i, i)].im = 0.0;
    }
    let chol = Cholesky::new(h)?;
    let l = chol.l_dirty();
    for i in 0..l.nrows() {
        let d = l[(i, i)];
        if !(d.re > 0.0) || !d.re.is_finite() || d.im.abs() > 1e-8 * d.re {
            return None;
        }
    }
    Some(chol)
}

/// `log2 det(m)` for a Hermitian positive definite matrix, via Cholesky.
/// Returns `None` when the factorization fails.
pub fn log2_det_hpd(m: &CMatrix) -> Option<f64> {
    let chol = hpd_cholesky(m)?;
    let l = chol.l_dirty();
    let acc: f64 = (0..l.nrows()).map(|i| l[(i, i)].re.log2()).sum();
    Some(2.0 * acc)
}

/// `x^H a^{-1} x` for Hermitian positive definite `a`, via Cholesky solves.
pub fn quad_form_inverse(a: &CMatrix, x: &CMatrix) -> Option<CMatrix> {
    let chol = hpd_cholesky(a)?;
    let l = chol.l();
    let y = l.solve_lower_triangular(x)?;
    Some(y.adjoint() * y)
}

/// Symmetrize away rounding so the Hermitian eigen/Cholesky routines see an
/// exactly Hermitian input.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn trace_re(m: &CMatrix) -> f64 {
    m.trace().re
}
