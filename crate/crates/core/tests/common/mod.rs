//! Reference implementations used as independent oracles in the integration
//! tests. Nothing here calls into the library's linear-algebra paths.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations,
/// ascending, with the matching eigenvectors as columns.
pub fn jacobi_symmetric(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut m = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = v.select_columns(order.iter());
    (values, vectors)
}

/// Real `2n x 2n` embedding `[[Re, -Im], [Im, Re]]` of a complex matrix.
pub fn real_embedding(m: &CMatrix) -> DMatrix<f64> {
    let (r, c) = m.shape();
    let mut out = DMatrix::<f64>::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let z = m[(i, j)];
            out[(i, j)] = z.re;
            out[(i, j + c)] = -z.im;
            out[(i + r, j)] = z.im;
            out[(i + r, j + c)] = z.re;
        }
    }
    out
}

/// Eigenvalues of a Hermitian matrix, ascending, via Jacobi on the real
/// embedding (each eigenvalue appears twice there).
pub fn oracle_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let (values, _) = jacobi_symmetric(&real_embedding(m));
    values.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect()
}

/// Orthonormal basis (as columns) for the eigenspace of the `count`
/// smallest eigenvalues of a Hermitian matrix, via the real embedding.
pub fn oracle_bottom_eigenspace(m: &CMatrix, count: usize) -> CMatrix {
    let n = m.nrows();
    let (_, vectors) = jacobi_symmetric(&real_embedding(m));
    let candidates: Vec<Vec<Complex64>> = (0..2 * count)
        .map(|c| (0..n).map(|i| Complex64::new(vectors[(i, c)], vectors[(i + n, c)])).collect())
        .collect();
    let basis = gram_schmidt_vectors(&candidates, 1e-8);
    assert_eq!(basis.len(), count, "eigenspace dimension mismatch");
    columns_to_matrix(&basis)
}

fn columns_to_matrix(cols: &[Vec<Complex64>]) -> CMatrix {
    let n = cols[0].len();
    CMatrix::from_fn(n, cols.len(), |i, j| cols[j][i])
}

/// Modified Gram-Schmidt that drops vectors whose residual norm falls below
/// `tol`.
pub fn gram_schmidt_vectors(vectors: &[Vec<Complex64>], tol: f64) -> Vec<Vec<Complex64>> {
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let proj: Complex64 = b.iter().zip(&w).map(|(bi, wi)| bi.conj() * wi).sum();
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= proj * bi;
                }
            }
        }
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > tol {
            basis.push(w.iter().map(|z| z / norm).collect());
        }
    }
    basis
}

/// Gram-Schmidt orthonormalization of the columns of `m`.
pub fn gram_schmidt(m: &CMatrix) -> CMatrix {
    let cols: Vec<Vec<Complex64>> = (0..m.ncols()).map(|j| m.column(j).iter().copied().collect()).collect();
    columns_to_matrix(&gram_schmidt_vectors(&cols, 1e-12))
}

pub fn projector(basis: &CMatrix) -> CMatrix {
    basis * basis.adjoint()
}

/// `log2 |det(m)|` via LU.
pub fn log2_det_lu(m: &CMatrix) -> f64 {
    m.clone().lu().determinant().norm().log2()
}

pub fn sum_grams(mats: &[&CMatrix]) -> CMatrix {
    let n = mats[0].nrows();
    mats.iter().fold(CMatrix::zeros(n, n), |acc, m| acc + *m * m.adjoint())
}

/// Capacity by the textbook formula with an explicit inverse.
pub fn oracle_capacity(signal: &CMatrix, jam: &[&CMatrix], power: f64, nt: usize, nj: usize) -> f64 {
    let n = signal.nrows();
    let eye = CMatrix::identity(n, n);
    let noise = &eye + sum_grams(jam).scale(power / nj as f64);
    let inv = noise.try_inverse().expect("invertible");
    let m = &eye + (signal * signal.adjoint()).scale(power / nt as f64) * inv;
    log2_det_lu(&m)
}

/// Bob's filtered rate by the ratio-of-determinants formula.
pub fn oracle_bob_rate(h0: &CMatrix, jam: &[&CMatrix], v: &CMatrix, power: f64, nt: usize, nj: usize) -> f64 {
    let k = v.ncols();
    let eye = CMatrix::identity(k, k);
    let a = v.adjoint() * (h0 * h0.adjoint()).scale(power / nt as f64) * v;
    let b = v.adjoint() * sum_grams(jam).scale(power / nj as f64) * v;
    log2_det_lu(&(&eye + &a + &b)) - log2_det_lu(&(&eye + &b))
}

/// `prod (1 + coeff * lambda)` over the `nt` smallest eigenvalues.
pub fn oracle_loss_product(sum: &CMatrix, nt: usize, coeff: f64) -> f64 {
    oracle_eigenvalues(sum)[..nt]
        .iter()
        .map(|&l| 1.0 + coeff * l.max(0.0))
        .product()
}

/// All sorted `k`-subsets of `0..s`, lexicographic, by recursion.
pub fn oracle_subsets(s: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, s: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..s {
            cur.push(i);
            go(i + 1, s, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, s, k, &mut Vec::new(), &mut out);
    out
}

/// First subset (lexicographic) whose score is within `tol` of the best.
pub fn oracle_pick(scores: &[(Vec<usize>, f64)], maximize: bool, tol: f64) -> (Vec<usize>, f64) {
    let best = scores
        .iter()
        .map(|(_, v)| *v)
        .fold(if maximize { f64::NEG_INFINITY } else { f64::INFINITY }, |a, b| {
            if maximize { a.max(b) } else { a.min(b) }
        });
    let chosen = scores
        .iter()
        .find(|(_, v)| if maximize { *v >= best - tol } else { *v <= best + tol })
        .expect("non-empty");
    (chosen.0.clone(), best)
}
