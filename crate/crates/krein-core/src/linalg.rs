//! Small dense complex linear-algebra helpers shared across the crate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Operator 2-norm (largest singular value). Zero for empty matrices.
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Hermitian part (M + M^H)/2.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Skew quotient (M - M^H)/(2i); Hermitian whenever M is square.
pub fn imaginary_part(m: &CMatrix) -> CMatrix {
    let h = (m - m.adjoint()) * c(0.0, -0.5);
    // symmetrize away roundoff so the Hermitian eigensolver sees an exact input
    hermitian_part(&h)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let sym = nalgebra::SymmetricEigen::new(hermitian_part(m));
    let mut ev: Vec<f64> = sym.eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn hermitian_min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m)
        .first()
        .copied()
        .unwrap_or(0.0)
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted descending;
/// returns (values, vectors) with vectors in matching column order.
pub fn hermitian_eigen_desc(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let sym = nalgebra::SymmetricEigen::new(hermitian_part(m));
    let n = sym.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| sym.eigenvalues[b].total_cmp(&sym.eigenvalues[a]));
    let values: Vec<f64> = order.iter().map(|&i| sym.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &sym.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Dense inverse through LU.
pub fn inverse(m: &CMatrix) -> Result<CMatrix> {
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidArgument("matrix is singular".into()))
}

/// 2-norm condition number estimate via singular values.
pub fn condition_estimate(m: &CMatrix) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Orthonormal basis of the column space: thin Q from column-pivoted QR,
/// truncated at the numerical rank.
pub fn orthonormal_basis(m: &CMatrix) -> CMatrix {
    let rows = m.nrows();
    let qr = m.clone().col_piv_qr();
    let q = qr.q();
    let r = qr.r();
    let k = q.ncols().min(r.nrows());
    let scale = r.diagonal().iter().map(|d| d.norm()).fold(0.0, f64::max);
    let tol = scale * (rows.max(m.ncols()) as f64) * f64::EPSILON;
    let mut rank = 0;
    for i in 0..k {
        if r[(i, i)].norm() > tol {
            rank += 1;
        }
    }
    q.columns(0, rank).into_owned()
}

/// Clip singular values at 1, projecting onto the unit operator-norm ball.
pub fn clip_to_unit_ball(m: &CMatrix) -> CMatrix {
    if m.is_empty() {
        return m.clone();
    }
    let svd = m.clone().svd(true, true);
    if svd.singular_values.iter().all(|&s| s <= 1.0) {
        return m.clone();
    }
    let mut svd = svd;
    for s in svd.singular_values.iter_mut() {
        if *s > 1.0 {
            *s = 1.0;
        }
    }
    svd.recompose().expect("svd recompose with full factors")
}

/// Kronecker product, used by the small dense Sylvester solves.
pub fn kronecker(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let scaled = b * a[(i, j)];
            out.view_mut((i * br, j * bc), (br, bc)).copy_from(&scaled);
        }
    }
    out
}

/// Column-major vectorization.
pub fn vectorize(m: &CMatrix) -> CVector {
    CVector::from_iterator(m.len(), m.iter().copied())
}

pub fn unvectorize(v: &CVector, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_iterator(rows, cols, v.iter().copied())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn op_norm_matches_two_by_two() {
        let m = CMatrix::from_row_slice(2, 2, &[c(3.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-4.0, 0.0)]);
        assert!((op_norm(&m) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn hermitian_min_eigenvalue_two_by_two_formula() {
        // [[2, -i/2], [i/2, 1]] has eigenvalues (3 +- sqrt(2))/2
        let m = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, -0.5), c(0.0, 0.5), c(1.0, 0.0)]);
        let expected = (3.0 - 2.0_f64.sqrt()) / 2.0;
        assert!((hermitian_min_eigenvalue(&m) - expected).abs() < 1e-13);
    }

    #[test]
    fn clip_keeps_contractions_and_shrinks_expansions() {
        let m = CMatrix::from_row_slice(1, 1, &[c(0.5, 0.0)]);
        assert!((op_norm(&clip_to_unit_ball(&m)) - 0.5).abs() < 1e-15);
        let m = CMatrix::from_row_slice(1, 1, &[c(0.0, 3.0)]);
        let clipped = clip_to_unit_ball(&m);
        assert!((op_norm(&clipped) - 1.0).abs() < 1e-14);
        // direction preserved
        assert!((clipped[(0, 0)] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn kronecker_vectorize_identity() {
        let a = CMatrix::from_row_slice(2, 2, &[c(1.0, 1.0), c(2.0, 0.0), c(0.0, -1.0), c(3.0, 2.0)]);
        let x = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(1.0, -1.0), c(2.0, 1.0), c(0.0, 0.0)]);
        let b = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.5), c(0.0, 1.0), c(-1.0, 0.0), c(2.0, 0.0)]);
        // vec(A X B) = (B^T (x) A) vec(X)
        let lhs = vectorize(&(&a * &x * &b));
        let rhs = kronecker(&b.transpose(), &a) * vectorize(&x);
        assert!((lhs - rhs).norm() < 1e-13);
    }

    #[test]
    fn orthonormal_basis_detects_rank() {
        let mut m = CMatrix::zeros(4, 3);
        m[(0, 0)] = c(1.0, 0.0);
        m[(1, 1)] = c(2.0, 0.0);
        m[(0, 2)] = c(3.0, 0.0); // dependent on column 0
        let q = orthonormal_basis(&m);
        assert_eq!(q.ncols(), 2);
        let gram = q.adjoint() * &q;
        assert!((gram - CMatrix::identity(2, 2)).norm() < 1e-14);
    }
}
