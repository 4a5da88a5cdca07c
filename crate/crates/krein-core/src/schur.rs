//! Complex Schur decomposition with eigenvalue reordering.
//!
//! Reordering moves a selected set of eigenvalues to the leading diagonal
//! positions through unitary similarity, so the leading columns of Q span the
//! associated invariant subspace exactly (up to roundoff). Adjacent swaps use
//! a single complex Givens rotation computed from the eigenvector of the
//! 2x2 diagonal block, the same device as LAPACK's ZTREXC.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};

#[derive(Debug, Clone)]
pub struct SchurForm {
    /// Unitary factor.
    pub q: CMatrix,
    /// Upper-triangular factor.
    pub t: CMatrix,
}

/// Complex Schur decomposition `M = Q T Q^H` with a deterministic retry on the
/// rare QR-iteration stall.
pub fn schur_decompose(m: &CMatrix) -> Result<SchurForm> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidArgument("schur input must be square".into()));
    }
    if let Some(s) = nalgebra::linalg::Schur::try_new(m.clone(), f64::EPSILON, 100_000) {
        let (q, t) = s.unpack();
        return Ok(SchurForm { q, t: zero_lower(t) });
    }
    // retry after conjugation by a fixed unitary; absorb it back into Q
    let u = fixed_unitary(m.nrows());
    if let Some(s) = nalgebra::linalg::Schur::try_new(u.adjoint() * m * &u, f64::EPSILON, 100_000) {
        let (q, t) = s.unpack();
        return Ok(SchurForm { q: u * q, t: zero_lower(t) });
    }
    Err(Error::SchurFailed)
}

fn zero_lower(mut t: CMatrix) -> CMatrix {
    let n = t.nrows();
    for i in 0..n {
        for j in 0..i {
            t[(i, j)] = Complex64::ZERO;
        }
    }
    t
}

fn fixed_unitary(n: usize) -> CMatrix {
    // deterministic full unitary from the QR of a fixed pseudo-random matrix
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let m = CMatrix::from_fn(n, n, |_, _| Complex64::new(next(), next()));
    m.qr().q()
}

impl SchurForm {
    pub fn dim(&self) -> usize {
        self.t.nrows()
    }

    /// Diagonal of T, in its current order.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.t.diagonal().iter().copied().collect()
    }

    /// Rotates positions `p` and `p+1`, exchanging the two diagonal entries.
    fn swap_adjacent(&mut self, p: usize) {
        let t11 = self.t[(p, p)];
        let t12 = self.t[(p, p + 1)];
        let t22 = self.t[(p + 1, p + 1)];
        // Givens zeroing the second entry of the eigenvector (t12, t22 - t11)
        let (cr, s) = givens(t12, t22 - t11);
        let n = self.dim();
        // rows p, p+1 of T
        for j in 0..n {
            let a = self.t[(p, j)];
            let b = self.t[(p + 1, j)];
            self.t[(p, j)] = a * cr + b * s;
            self.t[(p + 1, j)] = -a * s.conj() + b * cr;
        }
        // columns p, p+1 of T
        for i in 0..n {
            let a = self.t[(i, p)];
            let b = self.t[(i, p + 1)];
            self.t[(i, p)] = a * cr + b * s.conj();
            self.t[(i, p + 1)] = -a * s + b * cr;
        }
        // columns p, p+1 of Q
        for i in 0..n {
            let a = self.q[(i, p)];
            let b = self.q[(i, p + 1)];
            self.q[(i, p)] = a * cr + b * s.conj();
            self.q[(i, p + 1)] = -a * s + b * cr;
        }
        self.t[(p + 1, p)] = Complex64::ZERO;
        self.t[(p, p)] = t22;
        self.t[(p + 1, p + 1)] = t11;
    }

    /// Reorders the form so the positions flagged in `selected` occupy the
    /// leading block, preserving their relative order.
    pub fn reorder(&mut self, selected: &[bool]) -> Result<()> {
        if selected.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: selected.len() });
        }
        let mut flags = selected.to_vec();
        let mut front = 0;
        for i in 0..flags.len() {
            if flags[i] {
                let mut pos = i;
                while pos > front {
                    self.swap_adjacent(pos - 1);
                    flags.swap(pos - 1, pos);
                    pos -= 1;
                }
                front += 1;
            }
        }
        Ok(())
    }

    /// First `k` Schur vectors; an orthonormal basis of the invariant
    /// subspace for the leading k diagonal entries.
    pub fn leading_subspace(&self, k: usize) -> CMatrix {
        self.q.columns(0, k).into_owned()
    }
}

/// Selection of the `k` eigenvalues of largest imaginary part.
///
/// Returns the selection mask and the imaginary-part gap across the cut
/// (infinite when every eigenvalue is selected).
pub fn select_top_by_imag(eigenvalues: &[Complex64], k: usize) -> (Vec<bool>, f64) {
    let n = eigenvalues.len();
    debug_assert!(k <= n);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eigenvalues[b]
            .im
            .total_cmp(&eigenvalues[a].im)
            .then(eigenvalues[a].re.total_cmp(&eigenvalues[b].re))
            .then(a.cmp(&b))
    });
    let mut mask = vec![false; n];
    for &i in order.iter().take(k) {
        mask[i] = true;
    }
    let gap = if k == 0 || k == n {
        f64::INFINITY
    } else {
        eigenvalues[order[k - 1]].im - eigenvalues[order[k]].im
    };
    (mask, gap)
}

/// Greedy nearest-distance matching of `targets` against `eigenvalues`;
/// each position is used at most once. Returns the selection mask and the
/// largest matching distance.
pub fn select_by_matching(eigenvalues: &[Complex64], targets: &[Complex64]) -> (Vec<bool>, f64) {
    let mut mask = vec![false; eigenvalues.len()];
    let mut worst = 0.0f64;
    for t in targets {
        let mut best: Option<(usize, f64)> = None;
        for (i, ev) in eigenvalues.iter().enumerate() {
            if mask[i] {
                continue;
            }
            let d = (ev - t).norm();
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        if let Some((i, d)) = best {
            mask[i] = true;
            worst = worst.max(d);
        }
    }
    (mask, worst)
}

/// Eigenpairs of a general complex matrix via Schur form and triangular
/// back-substitution. Intended for diagnostics and test oracles; clustered
/// eigenvalues yield ill-conditioned eigenvectors as usual.
pub fn eigenpairs(m: &CMatrix) -> Result<Vec<(Complex64, CVector)>> {
    let form = schur_decompose(m)?;
    let n = form.dim();
    let t = &form.t;
    let scale = m.norm().max(1.0);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = t[(k, k)];
        let mut y = CVector::zeros(n);
        y[k] = Complex64::ONE;
        // solve (T[0..k,0..k] - lambda) y[0..k] = -T[0..k,k] upward
        for i in (0..k).rev() {
            let mut rhs = -t[(i, k)];
            for j in (i + 1)..k {
                rhs -= t[(i, j)] * y[j];
            }
            let mut diag = t[(i, i)] - lambda;
            let floor = f64::EPSILON * scale;
            if diag.norm() < floor {
                diag = Complex64::new(floor, 0.0);
            }
            y[i] = rhs / diag;
        }
        let x = &form.q * y;
        let norm = x.norm();
        out.push((lambda, x.unscale(norm)));
    }
    Ok(out)
}
