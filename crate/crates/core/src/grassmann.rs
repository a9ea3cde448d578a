//! Subspace geometry on the complex Grassmann manifold `G(n, d)`.
//!
//! A point is represented by a generator matrix with orthonormal columns.
//! Generators are not unique; only the projector `U U^H` is, so every
//! quantity computed here is a function of projectors.

use rand::Rng;

use crate::channel::complex_gaussian_matrix;
use crate::error::{OjsError, Result};
use crate::linalg::{gram, hermitian_eigen_desc, identity, CMatrix};

/// Smallest singular value accepted as full column rank.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// Generator matrix of a subspace: `ambient_dim x subspace_dim`, orthonormal
/// columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    basis: CMatrix,
}

impl SubspaceBasis {
    /// Orthonormalizes the columns of `m` (Householder QR).
    pub fn orthonormal_basis(m: &CMatrix) -> Result<Self> {
        let (rows, cols) = m.shape();
        if cols == 0 || cols > rows {
            return Err(OjsError::DimensionMismatch(format!(
                "cannot span a {cols}-dimensional subspace in C^{rows}"
            )));
        }
        let singular = m.clone().singular_values();
        let smallest = singular.iter().copied().fold(f64::INFINITY, f64::min);
        if !(smallest > RANK_TOLERANCE) {
            return Err(OjsError::RankDeficient {
                smallest_singular: smallest,
            });
        }
        let q = m.clone().qr().q();
        Ok(Self { basis: q })
    }

    /// Wraps a matrix that is already known to have orthonormal columns.
    pub(crate) fn from_orthonormal(basis: CMatrix) -> Self {
        debug_assert!(basis.ncols() >= 1 && basis.ncols() <= basis.nrows());
        Self { basis }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.basis
    }

    pub fn into_matrix(self) -> CMatrix {
        self.basis
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn subspace_dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Orthogonal projector onto the subspace.
    pub fn projector(&self) -> CMatrix {
        gram(&self.basis)
    }

    /// `|U^H U - I|_F`.
    pub fn orthonormality_residual(&self) -> f64 {
        (self.basis.adjoint() * &self.basis - identity(self.subspace_dim())).norm()
    }

    /// Generator of the orthogonal complement.
    pub fn orthogonal_complement(&self) -> Result<Self> {
        let n = self.ambient_dim();
        let d = self.subspace_dim();
        if d == n {
            return Err(OjsError::FullSpace);
        }
        // I - UU^H has eigenvalue 1 on the complement and 0 on the subspace.
        let complement_projector = identity(n) - self.projector();
        let (_, vectors) = hermitian_eigen_desc(&complement_projector);
        Ok(Self {
            basis: vectors.columns(0, n - d).into_owned(),
        })
    }
}

fn trace_overlap(a: &SubspaceBasis, b: &SubspaceBasis) -> f64 {
    // tr(P_a P_b) = |A^H B|_F^2
    (a.matrix().adjoint() * b.matrix()).norm_squared()
}

/// Squared chordal distance `min(dim h, dim q) - tr(P_h P_q)`.
///
/// With `dim h <= dim q` (the jammer-vs-aligned-subspace setting) this is
/// `dim h - tr(H H^H Q Q^H)`, in `[0, dim h]`.
pub fn chordal_distance_sq(h: &SubspaceBasis, q: &SubspaceBasis) -> Result<f64> {
    if h.ambient_dim() != q.ambient_dim() {
        return Err(OjsError::DimensionMismatch(format!(
            "ambient dimensions {} and {} differ",
            h.ambient_dim(),
            q.ambient_dim()
        )));
    }
    let p = h.subspace_dim().min(q.subspace_dim()) as f64;
    Ok((p - trace_overlap(h, q)).max(0.0))
}

pub fn chordal_distance(h: &SubspaceBasis, q: &SubspaceBasis) -> Result<f64> {
    chordal_distance_sq(h, q).map(f64::sqrt)
}

/// Squared chordal distance computed from the orthogonal complement
/// `q_perp` of the reference subspace: `tr(Q_perp^H H H^H Q_perp)`.
///
/// Requires `dim h <= ambient - dim q_perp`, the range where this equals
/// [`chordal_distance_sq`] against the complement of `q_perp`.
pub fn chordal_distance_sq_complement(h: &SubspaceBasis, q_perp: &SubspaceBasis) -> Result<f64> {
    if h.ambient_dim() != q_perp.ambient_dim() {
        return Err(OjsError::DimensionMismatch(format!(
            "ambient dimensions {} and {} differ",
            h.ambient_dim(),
            q_perp.ambient_dim()
        )));
    }
    if h.subspace_dim() + q_perp.subspace_dim() > h.ambient_dim() {
        return Err(OjsError::DimensionMismatch(format!(
            "dim h = {} exceeds the reference dimension {}",
            h.subspace_dim(),
            h.ambient_dim() - q_perp.subspace_dim()
        )));
    }
    Ok(trace_overlap(h, q_perp))
}

/// Best common subspace for a set of jamming subspaces.
#[derive(Debug, Clone)]
pub struct AlignedResidual {
    /// `min_Q sum_k d_c^2(H_k, Q)` over `(N_r - nt)`-dimensional `Q`.
    pub residual: f64,
    /// Generator of the complement of the minimizing `Q` (dimension `nt`).
    pub q_perp: SubspaceBasis,
    /// Eigenvalues of `sum_k H_k H_k^H`, descending.
    pub eigenvalues: Vec<f64>,
}

/// Minimizes `sum_k d_c^2(H_k, Q)` over `(ambient - nt)`-dimensional `Q`.
///
/// The optimal complement is spanned by the eigenvectors of the `nt`
/// smallest eigenvalues of `B = sum_k H_k H_k^H`; the residual is the sum of
/// those eigenvalues.
pub fn aligned_subspace_residual(bases: &[SubspaceBasis], nt: usize) -> Result<AlignedResidual> {
    let first = bases
        .first()
        .ok_or_else(|| OjsError::DimensionMismatch("no subspaces given".into()))?;
    let n = first.ambient_dim();
    let d = first.subspace_dim();
    if nt == 0 || nt >= n {
        return Err(OjsError::DimensionMismatch(format!(
            "nt = {nt} must lie in [1, {}]",
            n - 1
        )));
    }
    if d > n - nt {
        return Err(OjsError::DimensionMismatch(format!(
            "subspace dimension {d} exceeds reference dimension {}",
            n - nt
        )));
    }
    if bases
        .iter()
        .any(|b| b.ambient_dim() != n || b.subspace_dim() != d)
    {
        return Err(OjsError::DimensionMismatch(
            "subspaces have inconsistent dimensions".into(),
        ));
    }
    let mut b = CMatrix::zeros(n, n);
    for basis in bases {
        b += basis.projector();
    }
    let (eigenvalues, vectors) = hermitian_eigen_desc(&b);
    let residual = eigenvalues[n - nt..].iter().map(|v| v.max(0.0)).sum();
    let q_perp = SubspaceBasis::from_orthonormal(vectors.columns(n - nt, nt).into_owned());
    Ok(AlignedResidual {
        residual,
        q_perp,
        eigenvalues,
    })
}

/// Bounds `(sqrt(residual / K), sqrt(residual))` on the minimax alignment
/// measure `min_Q max_k d_c(H_k, Q)`.
pub fn alignment_measure_bounds(bases: &[SubspaceBasis], nt: usize) -> Result<(f64, f64)> {
    let aligned = aligned_subspace_residual(bases, nt)?;
    let k = bases.len() as f64;
    Ok(((aligned.residual / k).sqrt(), aligned.residual.sqrt()))
}

/// A uniformly distributed point of `G(ambient, dim)`: the span of an
/// `ambient x dim` i.i.d. CN(0, 1) matrix.
pub fn random_subspace<R: Rng + ?Sized>(ambient: usize, dim: usize, rng: &mut R) -> SubspaceBasis {
    assert!(dim >= 1 && dim <= ambient, "need 1 <= dim <= ambient");
    loop {
        let m = complex_gaussian_matrix(ambient, dim, rng);
        if let Ok(basis) = SubspaceBasis::orthonormal_basis(&m) {
            return basis;
        }
    }
}

/// A finite set of same-shaped subspaces.
#[derive(Debug, Clone)]
pub struct SubspaceCodebook {
    codewords: Vec<SubspaceBasis>,
}

impl SubspaceCodebook {
    pub fn new(codewords: Vec<SubspaceBasis>) -> Result<Self> {
        let first = codewords
            .first()
            .ok_or_else(|| OjsError::DimensionMismatch("codebook must be non-empty".into()))?;
        let shape = (first.ambient_dim(), first.subspace_dim());
        if codewords
            .iter()
            .any(|c| (c.ambient_dim(), c.subspace_dim()) != shape)
        {
            return Err(OjsError::DimensionMismatch(
                "codewords have inconsistent dimensions".into(),
            ));
        }
        Ok(Self { codewords })
    }

    /// `size` independent uniform codewords in `G(ambient, dim)`.
    pub fn random<R: Rng + ?Sized>(size: usize, ambient: usize, dim: usize, rng: &mut R) -> Result<Self> {
        Self::new((0..size).map(|_| random_subspace(ambient, dim, rng)).collect())
    }

    pub fn codewords(&self) -> &[SubspaceBasis] {
        &self.codewords
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.codewords[0].ambient_dim()
    }

    /// Chordal distance from `point` to the nearest codeword.
    pub fn distance_to_nearest(&self, point: &SubspaceBasis) -> Result<f64> {
        let mut best = f64::INFINITY;
        for codeword in &self.codewords {
            best = best.min(chordal_distance_sq(point, codeword)?);
        }
        Ok(best.sqrt())
    }

    /// Largest nearest-codeword distance over a fixed sample set. A lower
    /// estimate of the covering radius; zero for an empty sample set.
    pub fn covering_radius_over(&self, samples: &[SubspaceBasis]) -> Result<f64> {
        samples
            .iter()
            .try_fold(0.0_f64, |worst, s| Ok(worst.max(self.distance_to_nearest(s)?)))
    }
}

/// Default Monte Carlo sample count for covering-radius estimates.
pub const DEFAULT_COVERING_SAMPLES: usize = 2000;

/// Monte Carlo covering radius: the worst nearest-codeword chordal distance
/// over `num_samples` uniform `sample_dim`-dimensional subspaces.
pub fn estimate_covering_radius<R: Rng + ?Sized>(
    codebook: &SubspaceCodebook,
    sample_dim: usize,
    num_samples: usize,
    rng: &mut R,
) -> Result<f64> {
    if num_samples == 0 {
        return Err(OjsError::EmptySamples);
    }
    let ambient = codebook.ambient_dim();
    if sample_dim == 0 || sample_dim > ambient {
        return Err(OjsError::DimensionMismatch(format!(
            "sample dimension {sample_dim} out of range for C^{ambient}"
        )));
    }
    let mut worst = 0.0_f64;
    for _ in 0..num_samples {
        let sample = random_subspace(ambient, sample_dim, rng);
        worst = worst.max(codebook.distance_to_nearest(&sample)?);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn real(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
        let v: Vec<Complex64> = data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        CMatrix::from_row_slice(rows, cols, &v)
    }

    fn e(n: usize, idx: &[usize]) -> SubspaceBasis {
        let mut m = CMatrix::zeros(n, idx.len());
        for (c, &i) in idx.iter().enumerate() {
            m[(i, c)] = Complex64::new(1.0, 0.0);
        }
        SubspaceBasis::orthonormal_basis(&m).unwrap()
    }

    #[test]
    fn orthonormal_input_keeps_projector() {
        let m = e(3, &[0, 2]).into_matrix();
        let b = SubspaceBasis::orthonormal_basis(&m).unwrap();
        assert!((b.projector() - gram(&m)).norm() < 1e-12);
    }

    #[test]
    fn scaled_axis() {
        let b = SubspaceBasis::orthonormal_basis(&real(2, 1, &[2.0, 0.0])).unwrap();
        assert!((b.projector() - real(2, 2, &[1.0, 0.0, 0.0, 0.0])).norm() < 1e-12);
    }

    #[test]
    fn rank_deficient_rejected() {
        let m = real(3, 2, &[1.0, 2.0, 1.0, 2.0, 0.0, 0.0]);
        assert!(matches!(
            SubspaceBasis::orthonormal_basis(&m),
            Err(OjsError::RankDeficient { .. })
        ));
        assert!(SubspaceBasis::orthonormal_basis(&CMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn contained_subspace_has_zero_distance() {
        let q = e(4, &[0, 1, 3]);
        let h = e(4, &[3, 1]);
        assert!(chordal_distance_sq(&h, &q).unwrap().abs() < 1e-12);
    }

    #[test]
    fn analytic_distance_example() {
        let h = e(3, &[0, 1]);
        let q = e(3, &[1, 2]);
        assert!((chordal_distance_sq(&h, &q).unwrap() - 1.0).abs() < 1e-12);
        let q_perp = e(3, &[0]);
        assert!((chordal_distance_sq_complement(&h, &q_perp).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complement_orthogonal_gives_zero() {
        let h = e(3, &[0, 1]);
        let q_perp = e(3, &[2]);
        assert!(chordal_distance_sq_complement(&h, &q_perp).unwrap().abs() < 1e-12);
    }

    #[test]
    fn ambient_mismatch() {
        assert!(matches!(
            chordal_distance_sq(&e(3, &[0]), &e(4, &[0])),
            Err(OjsError::DimensionMismatch(_))
        ));
        assert!(chordal_distance_sq_complement(&e(3, &[0, 1]), &e(3, &[0, 2])).is_err());
    }

    #[test]
    fn complement_of_axis() {
        let c = e(2, &[0]).orthogonal_complement().unwrap();
        assert!((c.projector() - e(2, &[1]).projector()).norm() < 1e-12);
        assert_eq!(e(2, &[0, 1]).orthogonal_complement(), Err(OjsError::FullSpace));
    }

    #[test]
    fn residual_identical_bases_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_subspace(4, 2, &mut rng);
        let r = aligned_subspace_residual(&[h.clone(), h.clone(), h], 2).unwrap();
        assert!(r.residual.abs() < 1e-12);
    }

    #[test]
    fn residual_axis_example() {
        let r = aligned_subspace_residual(&[e(3, &[0, 1]), e(3, &[0, 2])], 1).unwrap();
        assert!((r.residual - 1.0).abs() < 1e-12);
        assert!((r.eigenvalues[0] - 2.0).abs() < 1e-12);
        let (lower, upper) = alignment_measure_bounds(&[e(3, &[0, 1]), e(3, &[0, 2])], 1).unwrap();
        assert!((lower - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((upper - 1.0).abs() < 1e-12);
    }

    #[test]
    fn residual_rejects_bad_dimensions() {
        assert!(aligned_subspace_residual(&[], 1).is_err());
        assert!(aligned_subspace_residual(&[e(3, &[0, 1])], 3).is_err());
        assert!(aligned_subspace_residual(&[e(3, &[0, 1])], 2).is_err());
        assert!(aligned_subspace_residual(&[e(3, &[0, 1]), e(3, &[0])], 1).is_err());
    }

    #[test]
    fn aligned_bounds_are_zero() {
        let (lo, hi) = alignment_measure_bounds(&[e(3, &[0, 1]), e(3, &[1, 0])], 1).unwrap();
        assert!(lo.abs() < 1e-7 && hi.abs() < 1e-7);
    }

    #[test]
    fn covering_over_contained_samples_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let q = random_subspace(3, 2, &mut rng);
        let book = SubspaceCodebook::new(vec![q.clone()]).unwrap();
        let samples: Vec<_> = (0..50)
            .map(|_| {
                let coeffs = complex_gaussian_matrix(2, 2, &mut rng);
                SubspaceBasis::orthonormal_basis(&(q.matrix() * coeffs)).unwrap()
            })
            .collect();
        assert!(book.covering_radius_over(&samples).unwrap() < 1e-7);
    }

    #[test]
    fn adding_codewords_never_increases_estimate() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let samples: Vec<_> = (0..200).map(|_| random_subspace(3, 2, &mut rng)).collect();
        let mut words = vec![random_subspace(3, 2, &mut rng)];
        let mut prev = SubspaceCodebook::new(words.clone())
            .unwrap()
            .covering_radius_over(&samples)
            .unwrap();
        for _ in 0..10 {
            words.push(random_subspace(3, 2, &mut rng));
            let next = SubspaceCodebook::new(words.clone())
                .unwrap()
                .covering_radius_over(&samples)
                .unwrap();
            assert!(next <= prev);
            prev = next;
        }
    }

    #[test]
    fn estimate_is_deterministic_and_validates() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let book = SubspaceCodebook::random(4, 3, 2, &mut rng).unwrap();
        let a = estimate_covering_radius(&book, 2, 100, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let b = estimate_covering_radius(&book, 2, 100, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        assert_eq!(a, b);
        assert!(estimate_covering_radius(&book, 2, 0, &mut rng).is_err());
        assert!(estimate_covering_radius(&book, 4, 10, &mut rng).is_err());
        assert!(SubspaceCodebook::new(vec![]).is_err());
    }
}
