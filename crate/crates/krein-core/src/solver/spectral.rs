//! Spectral construction of the invariant subspace: order the Schur form of
//! the (possibly regularized) operator by imaginary part, take the leading
//! `n_plus` Schur vectors, and read the angle operator off the graph.
//!
//! Ties across the selection cut — typical when the operator is selfadjoint
//! in the Krein space and carries real eigenvalues of both types — are broken
//! with the regularization `A + i eps P+`, which pushes positive-type
//! directions into the upper half-plane. The strategy walks the epsilon
//! schedule down to zero and sharpens the final selection on the Schur form
//! of the unregularized operator, so the returned subspace is invariant for
//! `A` itself to machine precision.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::krein::{
    angle_from_subspace, dissipativity_defect, subspace_from_angle, AngleOperator, BlockOperator,
    Subspace, DISSIPATIVITY_TOL,
};
use crate::linalg::{self, CMatrix};
use crate::riccati;
use crate::schur::{schur_decompose, select_by_matching, select_top_by_imag};
use crate::solver::{resolve_shift, Solution, SolveStrategy, SolverOptions, HALFPLANE_TOL, INVARIANCE_TOL};

pub struct SpectralStrategy;

/// Cut-gap floor below which a selection counts as degenerate; scaled so that
/// Schur eigenvalue noise on large operators cannot fake a clean cut.
fn gap_tolerance(a: &BlockOperator) -> f64 {
    let n = a.structure().dim() as f64;
    (a.norm() * n * 1e-14).max(1e-12)
}

struct Selected {
    angle: AngleOperator,
    eigenvalues: Vec<Complex64>,
}

/// Single ordered-Schur selection at a fixed regularization.
fn select_at(a: &BlockOperator, eps: f64, gap_tol: f64) -> Result<Selected> {
    let regularized = riccati::epsilon_regularize(a, eps);
    let mut form = schur_decompose(regularized.matrix())?;
    let eigs = form.eigenvalues();
    let n_plus = a.structure().n_plus();
    let (mask, gap) = select_top_by_imag(&eigs, n_plus);
    if gap < gap_tol {
        return Err(Error::SpectralSelectionDegenerate { gap });
    }
    form.reorder(&mask)?;
    let selected = form.eigenvalues().into_iter().take(n_plus).collect();
    let basis = form.leading_subspace(n_plus);
    let subspace = Subspace::from_basis(&basis)?;
    let angle = angle_from_subspace(&subspace, &a.structure())?;
    Ok(Selected { angle, eigenvalues: selected })
}

/// Selection of the positions matched against a target eigenvalue set, used
/// to transfer an ordering found at positive regularization back to the
/// unregularized operator.
fn select_matched(a: &BlockOperator, targets: &[Complex64]) -> Result<Selected> {
    let mut form = schur_decompose(a.matrix())?;
    let eigs = form.eigenvalues();
    let (mask, _worst) = select_by_matching(&eigs, targets);
    let n_plus = a.structure().n_plus();
    if mask.iter().filter(|&&s| s).count() != n_plus {
        return Err(Error::SpectralSelectionDegenerate { gap: 0.0 });
    }
    form.reorder(&mask)?;
    let selected = form.eigenvalues().into_iter().take(n_plus).collect();
    let basis = form.leading_subspace(n_plus);
    let subspace = Subspace::from_basis(&basis)?;
    let angle = angle_from_subspace(&subspace, &a.structure())?;
    Ok(Selected { angle, eigenvalues: selected })
}

/// Computes the angle operator of the spectral invariant subspace of
/// `A + i tie_epsilon P+` associated with the `n_plus` eigenvalues of largest
/// imaginary part.
///
/// When the eigenvalue cluster straddles the selection cut the call retries
/// with a larger regularization before giving up. A single call therefore
/// resolves ties against the regularized operator; the [`SpectralStrategy`]
/// drives `tie_epsilon` down the schedule and sharpens the result so it is
/// invariant for `A` itself.
pub fn spectral_angle_operator(a: &BlockOperator, tie_epsilon: f64) -> Result<AngleOperator> {
    if tie_epsilon < 0.0 {
        return Err(Error::InvalidArgument("tie_epsilon must be nonnegative".into()));
    }
    let defect = dissipativity_defect(a);
    if defect < -DISSIPATIVITY_TOL {
        return Err(Error::NotDissipative { defect });
    }
    let gap_tol = gap_tolerance(a);
    let ladder = [
        tie_epsilon,
        (10.0 * tie_epsilon).max(1e-8),
        (100.0 * tie_epsilon).max(1e-6),
    ];
    let mut last_gap = 0.0;
    for eps in ladder {
        match select_at(a, eps, gap_tol) {
            Ok(sel) => return Ok(sel.angle),
            Err(Error::SpectralSelectionDegenerate { gap }) => last_gap = gap,
            Err(Error::NotAGraph { .. }) | Err(Error::NotAContraction { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Err(Error::SpectralSelectionDegenerate { gap: last_gap })
}

fn halfplane_margin(a: &BlockOperator, angle: &AngleOperator) -> Result<f64> {
    let restricted = a.a11() + a.a12() * angle.matrix();
    let form = schur_decompose(&restricted)?;
    Ok(form
        .eigenvalues()
        .iter()
        .map(|ev| ev.im)
        .fold(f64::INFINITY, f64::min))
}

fn certify(a: &BlockOperator, angle: &AngleOperator) -> bool {
    if angle.norm() > 1.0 + HALFPLANE_TOL {
        return false;
    }
    let graph = subspace_from_angle(angle);
    if riccati::invariance_residual(a, &graph) > INVARIANCE_TOL * (1.0 + a.norm()) {
        return false;
    }
    halfplane_margin(a, angle).map_or(false, |m| m >= -HALFPLANE_TOL)
}

/// Newton polish of the quadratic Riccati form through the small dense
/// Sylvester solve; rescues selections whose limit point sits on a defective
/// eigenvalue cluster.
fn newton_refine(a: &BlockOperator, start: &CMatrix, steps: usize) -> Option<CMatrix> {
    let a11 = a.a11();
    let a12 = a.a12();
    let a21 = a.a21();
    let a22 = a.a22();
    let (m, p) = start.shape();
    let ident_p = CMatrix::identity(p, p);
    let ident_m = CMatrix::identity(m, m);
    let mut k = start.clone();
    let mut best_res = f64::INFINITY;
    for _ in 0..steps {
        let r = &a21 + &a22 * &k - &k * &a11 - &k * &a12 * &k;
        let res = linalg::op_norm(&r);
        if res >= best_res {
            break;
        }
        best_res = res;
        let left = &a22 - &k * &a12;
        let right = &a11 + &a12 * &k;
        let jac = linalg::kronecker(&ident_p, &left) - linalg::kronecker(&right.transpose(), &ident_m);
        if linalg::condition_estimate(&jac) > 1e12 {
            break;
        }
        let delta = jac.lu().solve(&(-linalg::vectorize(&r)))?;
        k += linalg::unvectorize(&delta, m, p);
    }
    Some(k)
}

impl SolveStrategy for SpectralStrategy {
    fn name(&self) -> &'static str {
        "spectral"
    }

    fn solve(&self, a: &BlockOperator, mu: Option<Complex64>, opts: &SolverOptions) -> Result<Solution> {
        opts.validate()?;
        let defect = dissipativity_defect(a);
        if defect < -DISSIPATIVITY_TOL {
            return Err(Error::NotDissipative { defect });
        }
        let gap_tol = gap_tolerance(a);
        let mu = resolve_shift(a, mu)?;

        let mut prev: Option<Selected> = None;
        let mut finished: Option<AngleOperator> = None;
        for &eps in &opts.epsilon_schedule {
            if eps > 0.0 {
                if let Ok(sel) = select_at(a, eps, gap_tol) {
                    prev = Some(sel);
                }
                continue;
            }
            // terminal stage: selection on A itself
            let direct = match select_at(a, 0.0, gap_tol) {
                Err(Error::SpectralSelectionDegenerate { gap }) => Err(gap),
                Err(Error::NotAGraph { .. }) | Err(Error::NotAContraction { .. }) => Err(0.0),
                Err(e) => return Err(e),
                Ok(sel) => Ok(sel),
            };
            match direct {
                Ok(sel) => {
                    finished = Some(sel.angle);
                    break;
                }
                Err(gap) => {
                    let prev = prev
                        .as_ref()
                        .ok_or(Error::SpectralSelectionDegenerate { gap })?;
                    if let Ok(sel) = select_matched(a, &prev.eigenvalues) {
                        if certify(a, &sel.angle) {
                            finished = Some(sel.angle);
                            break;
                        }
                    }
                    // defective cluster at the cut: polish the regularized
                    // angle operator against A directly
                    if let Some(mut k) = newton_refine(a, prev.angle.matrix(), 8) {
                        let norm = linalg::op_norm(&k);
                        if norm > 1.0 && norm <= 1.0 + 1e-8 {
                            k = linalg::clip_to_unit_ball(&k);
                        }
                        if let Ok(angle) = AngleOperator::new(a.structure(), k) {
                            if certify(a, &angle) {
                                finished = Some(angle);
                                break;
                            }
                        }
                    }
                    if certify(a, &prev.angle) {
                        finished = Some(prev.angle.clone());
                        break;
                    }
                    return Err(Error::SpectralSelectionDegenerate { gap });
                }
            }
        }

        let angle = finished.ok_or(Error::SpectralSelectionDegenerate { gap: 0.0 })?;
        Solution::assemble(a, angle, mu, "spectral", None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::krein::KreinStructure;
    use crate::linalg::c;

    fn ks11() -> KreinStructure {
        KreinStructure::new(1, 1).unwrap()
    }

    #[test]
    fn decoupled_diagonal_gives_zero_angle() {
        // A = diag(i, -i) is already split; K = 0 and the restriction is [i]
        let a = BlockOperator::new(
            ks11(),
            CMatrix::from_row_slice(2, 2, &[c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)]),
        )
        .unwrap();
        let k = spectral_angle_operator(&a, 0.0).unwrap();
        assert!(k.norm() < 1e-14);
    }

    #[test]
    fn anchor_angle_from_spectral_selection() {
        let a = BlockOperator::new(
            ks11(),
            CMatrix::from_row_slice(2, 2, &[c(0.0, 2.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, -1.0)]),
        )
        .unwrap();
        let k = spectral_angle_operator(&a, 0.0).unwrap();
        assert!((k.matrix()[(0, 0)] - c(0.0, -1.0 / 3.0)).norm() < 1e-14);
        // restriction A11 + A12 K = [2i]
        let restricted = a.a11() + a.a12() * k.matrix();
        assert!((restricted[(0, 0)] - c(0.0, 2.0)).norm() < 1e-14);
    }

    #[test]
    fn zero_operator_resolved_by_regularization() {
        // every subspace of ker A is invariant; the tie-break must land on H+
        let ks = KreinStructure::new(2, 2).unwrap();
        let a = BlockOperator::new(ks, CMatrix::zeros(4, 4)).unwrap();
        let sol = SpectralStrategy
            .solve(&a, Some(c(0.0, 1.0)), &SolverOptions::default())
            .unwrap();
        assert!(sol.angle.norm() < 1e-12);
        assert!(sol.invariance_residual < 1e-14);
    }

    #[test]
    fn neutral_pair_lands_on_upper_eigenvector() {
        // A = [[0, 1], [-1, 0]] is selfadjoint in the Krein space with
        // eigenvalues +-i; the invariant graph for +i is the neutral span of
        // (1, i), so K = [i] with margin 0
        let a = BlockOperator::new(
            ks11(),
            CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]),
        )
        .unwrap();
        let sol = SpectralStrategy.solve(&a, None, &SolverOptions::default()).unwrap();
        assert!((sol.angle.matrix()[(0, 0)] - c(0.0, 1.0)).norm() < 1e-12);
        assert!((sol.angle.norm() - 1.0).abs() < 1e-12);
        assert!(sol.invariance_residual < 1e-12);
    }

    #[test]
    fn non_dissipative_rejected() {
        let a = BlockOperator::new(ks11(), CMatrix::from_diagonal_element(2, 2, c(0.0, 1.0))).unwrap();
        assert!(matches!(
            spectral_angle_operator(&a, 0.0),
            Err(Error::NotDissipative { .. })
        ));
    }
}
