//! Finite-dimensional Krein-space primitives.
//!
//! A Krein space here is `C^{n_plus + n_minus}` with the indefinite inner
//! product `[x, y] = (Jx, y)` induced by the canonical symmetry
//! `J = diag(I_{n_plus}, -I_{n_minus})`. The Euclidean inner product `(x, y)`
//! is taken conjugate-linear in the second argument throughout the crate.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};

/// Numerical threshold below which a dissipativity defect still counts as
/// dissipative.
pub const DISSIPATIVITY_TOL: f64 = 1e-12;

/// Tolerance for the contraction bound on angle operators.
pub const ANGLE_NORM_TOL: f64 = 1e-10;

/// Dimensions of the positive and negative components together with the
/// canonical symmetry they induce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KreinStructure {
    n_plus: usize,
    n_minus: usize,
}

impl KreinStructure {
    pub fn new(n_plus: usize, n_minus: usize) -> Result<Self> {
        if n_plus == 0 || n_minus == 0 {
            return Err(Error::InvalidArgument(
                "both components of a Krein structure must have dimension >= 1".into(),
            ));
        }
        Ok(Self { n_plus, n_minus })
    }

    pub fn n_plus(&self) -> usize {
        self.n_plus
    }

    pub fn n_minus(&self) -> usize {
        self.n_minus
    }

    pub fn dim(&self) -> usize {
        self.n_plus + self.n_minus
    }

    /// The canonical symmetry J as a dense matrix.
    pub fn signature_matrix(&self) -> CMatrix {
        let mut j = CMatrix::identity(self.dim(), self.dim());
        for i in self.n_plus..self.dim() {
            j[(i, i)] = linalg::c(-1.0, 0.0);
        }
        j
    }

    /// Applies J without forming it.
    pub fn apply_signature(&self, x: &CVector) -> CVector {
        let mut out = x.clone();
        for i in self.n_plus..self.dim() {
            out[i] = -out[i];
        }
        out
    }

    /// Splits a vector into its positive and negative components.
    pub fn split(&self, x: &CVector) -> (CVector, CVector) {
        (
            x.rows(0, self.n_plus).into_owned(),
            x.rows(self.n_plus, self.n_minus).into_owned(),
        )
    }

    /// Assembles a vector from components.
    pub fn join(&self, x_plus: &CVector, x_minus: &CVector) -> CVector {
        let mut out = CVector::zeros(self.dim());
        out.rows_mut(0, self.n_plus).copy_from(x_plus);
        out.rows_mut(self.n_plus, self.n_minus).copy_from(x_minus);
        out
    }
}

/// A dense operator on the Krein space, stored whole with block accessors
/// following the splitting `H = H_plus (+) H_minus`.
#[derive(Debug, Clone)]
pub struct BlockOperator {
    structure: KreinStructure,
    matrix: CMatrix,
}

impl BlockOperator {
    pub fn new(structure: KreinStructure, matrix: CMatrix) -> Result<Self> {
        let n = structure.dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Self { structure, matrix })
    }

    pub fn from_blocks(
        structure: KreinStructure,
        a11: &CMatrix,
        a12: &CMatrix,
        a21: &CMatrix,
        a22: &CMatrix,
    ) -> Result<Self> {
        let (p, m) = (structure.n_plus(), structure.n_minus());
        if a11.shape() != (p, p) || a12.shape() != (p, m) || a21.shape() != (m, p) || a22.shape() != (m, m) {
            return Err(Error::InvalidArgument("block shapes do not match the structure".into()));
        }
        let mut matrix = CMatrix::zeros(p + m, p + m);
        matrix.view_mut((0, 0), (p, p)).copy_from(a11);
        matrix.view_mut((0, p), (p, m)).copy_from(a12);
        matrix.view_mut((p, 0), (m, p)).copy_from(a21);
        matrix.view_mut((p, p), (m, m)).copy_from(a22);
        Ok(Self { structure, matrix })
    }

    pub fn structure(&self) -> KreinStructure {
        self.structure
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn a11(&self) -> CMatrix {
        let p = self.structure.n_plus();
        self.matrix.view((0, 0), (p, p)).into_owned()
    }

    pub fn a12(&self) -> CMatrix {
        let (p, m) = (self.structure.n_plus(), self.structure.n_minus());
        self.matrix.view((0, p), (p, m)).into_owned()
    }

    pub fn a21(&self) -> CMatrix {
        let (p, m) = (self.structure.n_plus(), self.structure.n_minus());
        self.matrix.view((p, 0), (m, p)).into_owned()
    }

    pub fn a22(&self) -> CMatrix {
        let (p, m) = (self.structure.n_plus(), self.structure.n_minus());
        self.matrix.view((p, p), (m, m)).into_owned()
    }

    /// J*A as a dense matrix.
    pub fn j_times(&self) -> CMatrix {
        let mut ja = self.matrix.clone();
        let p = self.structure.n_plus();
        for i in p..self.structure.dim() {
            for j in 0..self.structure.dim() {
                ja[(i, j)] = -ja[(i, j)];
            }
        }
        ja
    }

    /// Operator 2-norm of the full matrix.
    pub fn norm(&self) -> f64 {
        linalg::op_norm(&self.matrix)
    }
}

/// The indefinite inner product `[x, y] = (Jx, y)`, conjugate-linear in `y`.
pub fn indefinite_inner(x: &CVector, y: &CVector, ks: &KreinStructure) -> Result<Complex64> {
    if x.len() != ks.dim() {
        return Err(Error::DimensionMismatch { expected: ks.dim(), actual: x.len() });
    }
    if y.len() != ks.dim() {
        return Err(Error::DimensionMismatch { expected: ks.dim(), actual: y.len() });
    }
    let jx = ks.apply_signature(x);
    // (u, v) = sum_i u_i conj(v_i)
    Ok(y.dotc(&jx))
}

/// Smallest eigenvalue of the Hermitian matrix (JA - (JA)^H)/(2i).
///
/// The operator is dissipative in the Krein space iff the returned defect is
/// nonnegative, and uniformly dissipative with margin `delta` iff the defect
/// is at least `delta`.
pub fn dissipativity_defect(a: &BlockOperator) -> f64 {
    let ja = a.j_times();
    linalg::hermitian_min_eigenvalue(&linalg::imaginary_part(&ja))
}

/// Finite-dimensional m-dissipativity test: dissipative matrices admit no
/// proper dissipative extension, so this collapses to a defect check against
/// [`DISSIPATIVITY_TOL`].
pub fn is_m_dissipative(a: &BlockOperator) -> bool {
    dissipativity_defect(a) >= -DISSIPATIVITY_TOL
}

/// A contraction `K: H_plus -> H_minus` whose graph is a maximal nonnegative
/// subspace.
#[derive(Debug, Clone)]
pub struct AngleOperator {
    structure: KreinStructure,
    matrix: CMatrix,
}

impl AngleOperator {
    /// Validates the shape and the contraction bound `||K|| <= 1 + ANGLE_NORM_TOL`.
    pub fn new(structure: KreinStructure, matrix: CMatrix) -> Result<Self> {
        if matrix.shape() != (structure.n_minus(), structure.n_plus()) {
            return Err(Error::InvalidArgument(format!(
                "angle operator must be {}x{}, got {}x{}",
                structure.n_minus(),
                structure.n_plus(),
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let norm = linalg::op_norm(&matrix);
        if norm > 1.0 + ANGLE_NORM_TOL {
            return Err(Error::NotAContraction { norm });
        }
        Ok(Self { structure, matrix })
    }

    pub fn zero(structure: KreinStructure) -> Self {
        Self {
            structure,
            matrix: CMatrix::zeros(structure.n_minus(), structure.n_plus()),
        }
    }

    pub fn structure(&self) -> KreinStructure {
        self.structure
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn norm(&self) -> f64 {
        linalg::op_norm(&self.matrix)
    }

    /// Subspace gap `||P_L - P_M||` between the graphs of two angle operators.
    pub fn gap(&self, other: &AngleOperator) -> f64 {
        subspace_from_angle(self).gap(&subspace_from_angle(other))
    }
}

/// A subspace stored through an orthonormal basis.
#[derive(Debug, Clone)]
pub struct Subspace {
    basis: CMatrix,
}

impl Subspace {
    /// Orthonormalizes the columns; fails when they are rank-deficient.
    pub fn from_basis(raw: &CMatrix) -> Result<Self> {
        if raw.ncols() == 0 || raw.nrows() == 0 {
            return Err(Error::InvalidArgument("empty subspace basis".into()));
        }
        let q = linalg::orthonormal_basis(raw);
        if q.ncols() != raw.ncols() {
            return Err(Error::InvalidArgument(format!(
                "basis is rank-deficient: rank {} < {} columns",
                q.ncols(),
                raw.ncols()
            )));
        }
        Ok(Self { basis: q })
    }

    /// Wraps columns that are already orthonormal (checked).
    pub fn from_orthonormal(basis: CMatrix) -> Result<Self> {
        let gram = basis.adjoint() * &basis;
        let err = (&gram - CMatrix::identity(basis.ncols(), basis.ncols())).norm();
        if err > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "columns are not orthonormal (Gram deviation {err:.3e})"
            )));
        }
        Ok(Self { basis })
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Orthogonal projector B B^H.
    pub fn projector(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }

    /// Gap metric `||P_L - P_M||` (operator 2-norm).
    pub fn gap(&self, other: &Subspace) -> f64 {
        linalg::op_norm(&(self.projector() - other.projector()))
    }
}

/// Orthonormalized basis of the graph `{(x_plus, K x_plus)}`.
pub fn subspace_from_angle(k: &AngleOperator) -> Subspace {
    let p = k.structure().n_plus();
    let m = k.structure().n_minus();
    let mut raw = CMatrix::zeros(p + m, p);
    raw.view_mut((0, 0), (p, p)).copy_from(&CMatrix::identity(p, p));
    raw.view_mut((p, 0), (m, p)).copy_from(k.matrix());
    Subspace::from_basis(&raw).expect("graph basis has full column rank")
}

/// Smallest eigenvalue of the compressed indefinite form `B^H J B`.
///
/// The subspace is nonnegative iff the margin is >= -1e-12, and maximal
/// nonnegative iff additionally its dimension equals `n_plus`.
pub fn nonnegativity_margin(l: &Subspace, ks: &KreinStructure) -> Result<f64> {
    if l.ambient_dim() != ks.dim() {
        return Err(Error::DimensionMismatch { expected: ks.dim(), actual: l.ambient_dim() });
    }
    let jb = {
        let mut jb = l.basis().clone();
        for i in ks.n_plus()..ks.dim() {
            for j in 0..jb.ncols() {
                jb[(i, j)] = -jb[(i, j)];
            }
        }
        jb
    };
    let compressed = l.basis().adjoint() * jb;
    Ok(linalg::hermitian_min_eigenvalue(&compressed))
}

/// Recovers the angle operator of a graph subspace, solving `K B_plus = B_minus`.
///
/// Fails when the subspace does not project bijectively onto `H_plus`, which
/// signals that it is not maximal nonnegative.
pub fn angle_from_subspace(l: &Subspace, ks: &KreinStructure) -> Result<AngleOperator> {
    if l.ambient_dim() != ks.dim() {
        return Err(Error::DimensionMismatch { expected: ks.dim(), actual: l.ambient_dim() });
    }
    if l.dim() != ks.n_plus() {
        return Err(Error::InvalidArgument(format!(
            "graph subspaces must have dimension n_plus = {}, got {}",
            ks.n_plus(),
            l.dim()
        )));
    }
    let b_plus = l.basis().view((0, 0), (ks.n_plus(), ks.n_plus())).into_owned();
    let b_minus = l.basis().view((ks.n_plus(), 0), (ks.n_minus(), ks.n_plus())).into_owned();
    let sv = b_plus.clone().singular_values();
    let sigma_min = sv.min();
    if sigma_min < 1e-10 {
        return Err(Error::NotAGraph { sigma_min });
    }
    // K = B_minus * B_plus^{-1}
    let b_plus_inv = linalg::inverse(&b_plus)?;
    let mut k = b_minus * b_plus_inv;
    // shave roundoff excess above the unit ball before validating
    let norm = linalg::op_norm(&k);
    if norm > 1.0 && norm <= 1.0 + 1e-8 {
        k = linalg::clip_to_unit_ball(&k);
    }
    AngleOperator::new(*&ks.clone(), k)
}
