//! Residuals certifying that a graph subspace is invariant: the
//! shift-parametrized Riccati form, its quadratic (shift-free) form, and the
//! direct projector-based invariance defect.

use crate::krein::{AngleOperator, BlockOperator, Subspace};
use crate::linalg::{self, CMatrix};
use crate::transfer::TransferData;

/// Residual of `(1 - K G)(A22 - mu)(F + K) = K (S - mu)`, scaled by
/// `1 / (1 + ||A||)`.
pub fn riccati_residual(a: &BlockOperator, td: &TransferData, k: &AngleOperator) -> f64 {
    let ks = a.structure();
    let m = ks.n_minus();
    let p = ks.n_plus();
    let km = k.matrix();
    let a22_shift = a.a22() - CMatrix::from_diagonal_element(m, m, td.mu);
    let s_shift = &td.s - CMatrix::from_diagonal_element(p, p, td.mu);
    let lhs = (CMatrix::identity(m, m) - km * &td.g) * a22_shift * (&td.f + km);
    let rhs = km * s_shift;
    linalg::op_norm(&(lhs - rhs)) / (1.0 + a.norm())
}

/// Residual of the quadratic form `A21 + A22 K - K A11 - K A12 K = 0`,
/// scaled by `1 / (1 + ||A||)`. Equivalent to the shift-parametrized form in
/// finite dimension: both vanish together.
pub fn pontryagin_residual(a: &BlockOperator, k: &AngleOperator) -> f64 {
    let km = k.matrix();
    let r = a.a21() + a.a22() * km - km * a.a11() - km * a.a12() * km;
    linalg::op_norm(&r) / (1.0 + a.norm())
}

/// Classical invariance defect `||(I - P_L) A P_L||` of a subspace.
pub fn invariance_residual(a: &BlockOperator, l: &Subspace) -> f64 {
    let b = l.basis();
    let ab = a.matrix() * b;
    let residual = &ab - b * (b.adjoint() * &ab);
    linalg::op_norm(&residual)
}

/// Shifts the upper-left block by `i eps`, raising the dissipativity margin
/// on the positive component by exactly `eps`.
pub fn epsilon_regularize(a: &BlockOperator, eps: f64) -> BlockOperator {
    let p = a.structure().n_plus();
    let mut matrix = a.matrix().clone();
    for i in 0..p {
        matrix[(i, i)] += linalg::c(0.0, eps);
    }
    BlockOperator::new(a.structure(), matrix).expect("same shape as source")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::krein::KreinStructure;
    use crate::linalg::{c, CVector};
    use crate::transfer::transfer_data;

    fn ks11() -> KreinStructure {
        KreinStructure::new(1, 1).unwrap()
    }

    fn anchor() -> BlockOperator {
        BlockOperator::new(
            ks11(),
            CMatrix::from_row_slice(2, 2, &[c(0.0, 2.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, -1.0)]),
        )
        .unwrap()
    }

    fn angle(v: f64, w: f64) -> AngleOperator {
        AngleOperator::new(ks11(), CMatrix::from_row_slice(1, 1, &[c(v, w)])).unwrap()
    }

    #[test]
    fn anchor_solution_zeroes_both_residuals() {
        // K = -i/3: 1 + (-i)(-i/3) - (-i/3)(2i) = 1 - 1/3 - 2/3 = 0
        let a = anchor();
        let k = angle(0.0, -1.0 / 3.0);
        let td = transfer_data(&a, c(0.0, 1.0)).unwrap();
        assert!(riccati_residual(&a, &td, &k) < 1e-15);
        assert!(pontryagin_residual(&a, &k) < 1e-15);
    }

    #[test]
    fn zero_angle_without_lower_coupling() {
        let ks = ks11();
        let a = BlockOperator::from_blocks(
            ks,
            &CMatrix::from_row_slice(1, 1, &[c(0.0, 2.0)]),
            &CMatrix::from_row_slice(1, 1, &[c(1.5, 0.0)]),
            &CMatrix::zeros(1, 1),
            &CMatrix::from_row_slice(1, 1, &[c(0.0, -1.0)]),
        )
        .unwrap();
        let k = AngleOperator::zero(ks);
        let td = transfer_data(&a, c(0.0, 1.0)).unwrap();
        assert_eq!(riccati_residual(&a, &td, &k), 0.0);
        assert_eq!(pontryagin_residual(&a, &k), 0.0);
    }

    #[test]
    fn zero_angle_with_lower_coupling_shows_a21() {
        // K = 0 collapses the quadratic form to A21
        let a = anchor();
        let k = AngleOperator::zero(ks11());
        let expected = 1.0 / (1.0 + a.norm());
        assert!((pontryagin_residual(&a, &k) - expected).abs() < 1e-14);
    }

    #[test]
    fn invariance_of_eigen_span() {
        let a = anchor();
        // A (1, -i/3) = (2i, 2/3) = 2i (1, -i/3): eigenvector for 2i
        let raw = CMatrix::from_row_slice(2, 1, &[c(1.0, 0.0), c(0.0, -1.0 / 3.0)]);
        let l = Subspace::from_basis(&raw).unwrap();
        assert!(invariance_residual(&a, &l) < 1e-14);
    }

    #[test]
    fn positive_component_not_invariant_under_coupling() {
        let a = anchor();
        let mut raw = CMatrix::zeros(2, 1);
        raw[(0, 0)] = c(1.0, 0.0);
        let l = Subspace::from_basis(&raw).unwrap();
        // residual is exactly ||A21|| = 1
        assert!((invariance_residual(&a, &l) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn regularization_shifts_only_the_upper_block() {
        let a = anchor();
        let reg = epsilon_regularize(&a, 0.5);
        assert!((reg.a11()[(0, 0)] - c(0.0, 2.5)).norm() < 1e-15);
        assert_eq!(reg.a12(), a.a12());
        assert_eq!(reg.a21(), a.a21());
        assert_eq!(reg.a22(), a.a22());
        let unchanged = epsilon_regularize(&a, 0.0);
        assert_eq!(unchanged.matrix(), a.matrix());
    }

    #[test]
    fn regularization_raises_defect_on_positive_vectors() {
        // Im [(A + i eps P+) x, x] - Im [A x, x] = eps ||x_+||^2 exactly
        let a = anchor();
        let ks = a.structure();
        let eps = 0.25;
        let reg = epsilon_regularize(&a, eps);
        let x = CVector::from_vec(vec![c(0.8, -0.3), c(0.0, 0.0)]);
        let before = crate::krein::indefinite_inner(&(a.matrix() * &x), &x, &ks).unwrap();
        let after = crate::krein::indefinite_inner(&(reg.matrix() * &x), &x, &ks).unwrap();
        let x_plus_sq = 0.8f64.powi(2) + 0.3f64.powi(2);
        assert!((after.im - before.im - eps * x_plus_sq).abs() < 1e-15);
    }
}
