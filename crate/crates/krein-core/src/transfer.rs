//! Transfer-function quantities of a block operator at a spectral shift:
//! the resolvent couplings F, G and the Schur complement S, together with
//! the factorization and quadratic-form identities they satisfy.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::krein::BlockOperator;
use crate::linalg::{self, c, CMatrix, CVector};

/// Condition-number guard on `A22 - mu`; shifts beyond this are rejected as
/// bad rather than treated as genuinely singular.
pub const SHIFT_CONDITION_LIMIT: f64 = 1e12;

/// The shift together with
/// `F = (A22 - mu)^{-1} A21`, `G = A12 (A22 - mu)^{-1}` and the Schur
/// complement `S = A11 - A12 (A22 - mu)^{-1} A21`.
#[derive(Debug, Clone)]
pub struct TransferData {
    pub mu: Complex64,
    pub f: CMatrix,
    pub g: CMatrix,
    pub s: CMatrix,
}

/// A path `mu = i tau` up the imaginary axis, inside the sector of aperture
/// `epsilon` around it.
#[derive(Debug, Clone)]
pub struct SectorPath {
    pub epsilon: f64,
    pub tau_grid: Vec<f64>,
}

impl SectorPath {
    pub fn new(epsilon: f64, tau_grid: Vec<f64>) -> Result<Self> {
        if epsilon <= 0.0 {
            return Err(Error::InvalidArgument("sector aperture must be positive".into()));
        }
        if tau_grid.is_empty() {
            return Err(Error::InvalidArgument("empty tau grid".into()));
        }
        if tau_grid[0] <= 0.0 || tau_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "tau grid must be strictly increasing and positive".into(),
            ));
        }
        Ok(Self { epsilon, tau_grid })
    }
}

/// Computes F, G, S at the shift `mu`, rejecting shifts for which
/// `A22 - mu` is ill-conditioned.
pub fn transfer_data(a: &BlockOperator, mu: Complex64) -> Result<TransferData> {
    let m = a.structure().n_minus();
    let shifted = a.a22() - CMatrix::from_diagonal_element(m, m, mu);
    let cond = linalg::condition_estimate(&shifted);
    if !cond.is_finite() || cond > SHIFT_CONDITION_LIMIT {
        return Err(Error::IllConditionedShift { mu, cond });
    }
    let inv = linalg::inverse(&shifted)?;
    let f = &inv * a.a21();
    let g = a.a12() * &inv;
    let s = a.a11() - &g * a.a21();
    Ok(TransferData { mu, f, g, s })
}

fn embed_blocks(p: usize, m: usize, tl: &CMatrix, tr: &CMatrix, bl: &CMatrix, br: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(p + m, p + m);
    out.view_mut((0, 0), (p, p)).copy_from(tl);
    out.view_mut((0, p), (p, m)).copy_from(tr);
    out.view_mut((p, 0), (m, p)).copy_from(bl);
    out.view_mut((p, p), (m, m)).copy_from(br);
    out
}

/// Relative residual of the Frobenius-Schur factorization
/// `A - mu = [[1, G], [0, 1]] diag(S - mu, A22 - mu) [[1, 0], [F, 1]]`,
/// maximized with its signed variant
/// `JA + mu = J [[1, G], [0, 1]] diag(S + mu, A22 - mu) [[1, 0], [F, 1]]`.
pub fn frobenius_schur_residual(a: &BlockOperator, td: &TransferData) -> f64 {
    let ks = a.structure();
    let (p, m) = (ks.n_plus(), ks.n_minus());
    let n = ks.dim();
    let ident_p = CMatrix::identity(p, p);
    let ident_m = CMatrix::identity(m, m);
    let zero_pm = CMatrix::zeros(p, m);
    let zero_mp = CMatrix::zeros(m, p);

    let upper = embed_blocks(p, m, &ident_p, &td.g, &zero_mp, &ident_m);
    let lower = embed_blocks(p, m, &ident_p, &zero_pm, &td.f, &ident_m);
    let a22_shift = a.a22() - CMatrix::from_diagonal_element(m, m, td.mu);

    let shifted = a.matrix() - CMatrix::from_diagonal_element(n, n, td.mu);
    let mid = embed_blocks(
        p,
        m,
        &(td.s.clone() - CMatrix::from_diagonal_element(p, p, td.mu)),
        &zero_pm,
        &zero_mp,
        &a22_shift,
    );
    let denom = linalg::op_norm(&shifted).max(f64::MIN_POSITIVE);
    let res_plain = linalg::op_norm(&(&shifted - &upper * &mid * &lower)) / denom;

    let signed_lhs = a.j_times() + CMatrix::from_diagonal_element(n, n, td.mu);
    let mid_signed = embed_blocks(
        p,
        m,
        &(td.s.clone() + CMatrix::from_diagonal_element(p, p, td.mu)),
        &zero_pm,
        &zero_mp,
        &a22_shift,
    );
    let j = ks.signature_matrix();
    let denom_signed = linalg::op_norm(&signed_lhs).max(f64::MIN_POSITIVE);
    let res_signed =
        linalg::op_norm(&(&signed_lhs - j * &upper * &mid_signed * &lower)) / denom_signed;

    res_plain.max(res_signed)
}

/// Absolute residual of the quadratic identity
/// `(S x, x) = (JA (x, -Fx), (x, -Fx)) + mu (Fx, Fx)` for a probe `x` in the
/// positive component.
pub fn quadratic_identity_residual(a: &BlockOperator, td: &TransferData, x_plus: &CVector) -> Result<f64> {
    let ks = a.structure();
    if x_plus.len() != ks.n_plus() {
        return Err(Error::DimensionMismatch { expected: ks.n_plus(), actual: x_plus.len() });
    }
    // (u, v) conjugate-linear in v
    let inner = |u: &CVector, v: &CVector| v.dotc(u);
    let sx = &td.s * x_plus;
    let lhs = inner(&sx, x_plus);
    let fx = &td.f * x_plus;
    let v = ks.join(x_plus, &(-&fx));
    let jav = ks.apply_signature(&(a.matrix() * &v));
    let rhs = inner(&jav, &v) + td.mu * inner(&fx, &fx);
    Ok((lhs - rhs).norm())
}

/// Smallest eigenvalue of the Hermitian part quotient `(S - S^H)/(2i)`:
/// the Schur complement inherits dissipativity from the source operator for
/// shifts in the upper half-plane.
pub fn transfer_dissipativity_defect(td: &TransferData) -> f64 {
    linalg::hermitian_min_eigenvalue(&linalg::imaginary_part(&td.s))
}

/// Norm profile `tau -> ||G(i tau)||` along the imaginary axis.
pub fn g_norm_decay(a: &BlockOperator, path: &SectorPath) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(path.tau_grid.len());
    for &tau in &path.tau_grid {
        let td = transfer_data(a, c(0.0, tau)).map_err(|e| match e {
            Error::IllConditionedShift { .. } => Error::SingularResolvent { tau },
            other => other,
        })?;
        out.push((tau, linalg::op_norm(&td.g)));
    }
    Ok(out)
}

/// Default shift selection: `mu = i tau` with `tau` the smallest power of two
/// for which the coupling norm `||G(i tau)||` drops below 1/2.
pub fn select_shift(a: &BlockOperator) -> Result<Complex64> {
    let mut tau = 1.0f64;
    let tau_max = 2f64.powi(40);
    while tau <= tau_max {
        let mu = c(0.0, tau);
        match transfer_data(a, mu) {
            Ok(td) => {
                if linalg::op_norm(&td.g) < 0.5 {
                    return Ok(mu);
                }
            }
            Err(Error::IllConditionedShift { .. }) => {}
            Err(e) => return Err(e),
        }
        tau *= 2.0;
    }
    Err(Error::ShiftSelectionFailed { tau_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::krein::KreinStructure;

    fn ks11() -> KreinStructure {
        KreinStructure::new(1, 1).unwrap()
    }

    /// A = [[0, 1], [1, -i]]
    fn coupled_scalar() -> BlockOperator {
        BlockOperator::new(
            ks11(),
            CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, -1.0)]),
        )
        .unwrap()
    }

    /// A = [[2i, 0], [1, -i]]
    fn anchor() -> BlockOperator {
        BlockOperator::new(
            ks11(),
            CMatrix::from_row_slice(2, 2, &[c(0.0, 2.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, -1.0)]),
        )
        .unwrap()
    }

    #[test]
    fn decoupled_blocks_give_plain_schur_complement() {
        let ks = KreinStructure::new(2, 2).unwrap();
        let a11 = CMatrix::from_row_slice(2, 2, &[c(1.0, 2.0), c(0.5, 0.0), c(0.0, -1.0), c(3.0, 0.0)]);
        let a22 = CMatrix::from_diagonal_element(2, 2, c(0.0, -1.0));
        let a = BlockOperator::from_blocks(ks, &a11, &CMatrix::zeros(2, 2), &CMatrix::zeros(2, 2), &a22).unwrap();
        let td = transfer_data(&a, c(0.0, 1.0)).unwrap();
        assert_eq!(linalg::op_norm(&td.f), 0.0);
        assert_eq!(linalg::op_norm(&td.g), 0.0);
        assert!((&td.s - &a11).norm() == 0.0);
        assert_eq!(frobenius_schur_residual(&a, &td), 0.0);
    }

    #[test]
    fn scalar_transfer_values() {
        // mu = i: A22 - mu = -2i, F = G = i/2, S = -i/2
        let a = coupled_scalar();
        let td = transfer_data(&a, c(0.0, 1.0)).unwrap();
        assert!((td.f[(0, 0)] - c(0.0, 0.5)).norm() < 1e-15);
        assert!((td.g[(0, 0)] - c(0.0, 0.5)).norm() < 1e-15);
        assert!((td.s[(0, 0)] - c(0.0, -0.5)).norm() < 1e-15);
        assert!(frobenius_schur_residual(&a, &td) < 1e-15);
    }

    #[test]
    fn singular_shift_is_rejected() {
        // A22 = -i, mu = -i makes A22 - mu = 0
        let a = coupled_scalar();
        assert!(matches!(
            transfer_data(&a, c(0.0, -1.0)),
            Err(Error::IllConditionedShift { .. })
        ));
    }

    #[test]
    fn quadratic_identity_scalar() {
        let a = coupled_scalar();
        let td = transfer_data(&a, c(0.0, 1.0)).unwrap();
        let x = CVector::from_vec(vec![c(1.0, 0.0)]);
        assert!(quadratic_identity_residual(&a, &td, &x).unwrap() < 1e-15);
    }

    #[test]
    fn quadratic_identity_reduces_when_uncoupled_below() {
        // A21 = 0 forces F = 0 and the identity collapses to (S x, x) = (A11 x, x)
        let ks = ks11();
        let a = BlockOperator::from_blocks(
            ks,
            &CMatrix::from_row_slice(1, 1, &[c(0.3, 0.7)]),
            &CMatrix::from_row_slice(1, 1, &[c(2.0, 0.0)]),
            &CMatrix::zeros(1, 1),
            &CMatrix::from_row_slice(1, 1, &[c(0.0, -1.0)]),
        )
        .unwrap();
        let td = transfer_data(&a, c(0.0, 1.0)).unwrap();
        let x = CVector::from_vec(vec![c(1.0, -2.0)]);
        assert!(quadratic_identity_residual(&a, &td, &x).unwrap() < 1e-14);
    }

    #[test]
    fn transfer_defect_examples() {
        // decoupled A11 = 2i: Im S = 2
        let ks = ks11();
        let a = BlockOperator::from_blocks(
            ks,
            &CMatrix::from_row_slice(1, 1, &[c(0.0, 2.0)]),
            &CMatrix::zeros(1, 1),
            &CMatrix::zeros(1, 1),
            &CMatrix::from_row_slice(1, 1, &[c(0.0, -1.0)]),
        )
        .unwrap();
        let td = transfer_data(&a, c(0.0, 1.0)).unwrap();
        assert!((transfer_dissipativity_defect(&td) - 2.0).abs() < 1e-14);

        // anchor at mu = i: S = 2i
        let td = transfer_data(&anchor(), c(0.0, 1.0)).unwrap();
        assert!((td.s[(0, 0)] - c(0.0, 2.0)).norm() < 1e-15);
        assert!((transfer_dissipativity_defect(&td) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn scalar_g_norm_profile() {
        // A12 = 1, A22 = -i: ||G(i tau)|| = 1/(1 + tau)
        let ks = ks11();
        let a = BlockOperator::from_blocks(
            ks,
            &CMatrix::zeros(1, 1),
            &CMatrix::from_row_slice(1, 1, &[c(1.0, 0.0)]),
            &CMatrix::zeros(1, 1),
            &CMatrix::from_row_slice(1, 1, &[c(0.0, -1.0)]),
        )
        .unwrap();
        let path = SectorPath::new(0.5, vec![1.0, 9.0, 99.0]).unwrap();
        let profile = g_norm_decay(&a, &path).unwrap();
        assert!((profile[0].1 - 0.5).abs() < 1e-14);
        assert!((profile[1].1 - 0.1).abs() < 1e-14);
        assert!((profile[2].1 - 0.01).abs() < 1e-14);
    }

    #[test]
    fn g_norm_zero_without_upper_coupling() {
        let ks = ks11();
        let a = BlockOperator::from_blocks(
            ks,
            &CMatrix::from_row_slice(1, 1, &[c(0.0, 2.0)]),
            &CMatrix::zeros(1, 1),
            &CMatrix::from_row_slice(1, 1, &[c(1.0, 0.0)]),
            &CMatrix::from_row_slice(1, 1, &[c(0.0, -1.0)]),
        )
        .unwrap();
        let path = SectorPath::new(0.5, vec![1.0, 10.0]).unwrap();
        assert!(g_norm_decay(&a, &path).unwrap().iter().all(|&(_, g)| g == 0.0));
    }

    #[test]
    fn sector_path_validation() {
        assert!(SectorPath::new(0.0, vec![1.0]).is_err());
        assert!(SectorPath::new(0.5, vec![]).is_err());
        assert!(SectorPath::new(0.5, vec![1.0, 1.0]).is_err());
        assert!(SectorPath::new(0.5, vec![-1.0, 1.0]).is_err());
    }

    #[test]
    fn default_shift_for_anchor() {
        // G = 0 for the anchor, so the first candidate tau = 1 is taken
        let mu = select_shift(&anchor()).unwrap();
        assert_eq!(mu, c(0.0, 1.0));
    }
}
