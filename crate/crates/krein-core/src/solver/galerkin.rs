//! Nested compressions of the positive component: each stage restricts the
//! upper-left block to a subspace of `H_plus`, solves the compressed problem,
//! and embeds the stage angle operator back into the full space. The last
//! stage uses the identity projection, so its solution solves the full
//! problem while the earlier stages document convergence.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::krein::{AngleOperator, BlockOperator, KreinStructure};
use crate::linalg::{self, CMatrix};
use crate::solver::{resolve_shift, AutoStrategy, Solution, SolveStrategy, SolverOptions};
use crate::transfer::transfer_data;

/// A chain of orthogonal projections of strictly increasing rank on the
/// positive component, the last being the identity.
#[derive(Debug, Clone)]
pub struct GalerkinScheme {
    projections: Vec<CMatrix>,
}

impl GalerkinScheme {
    pub fn new(projections: Vec<CMatrix>) -> Result<Self> {
        if projections.is_empty() {
            return Err(Error::InvalidArgument("empty projection chain".into()));
        }
        let n = projections[0].nrows();
        let mut last_rank = 0usize;
        for (idx, p) in projections.iter().enumerate() {
            if p.nrows() != n || p.ncols() != n {
                return Err(Error::InvalidArgument(format!("projection {idx} is not {n}x{n}")));
            }
            if (p - p.adjoint()).norm() > 1e-12 * (1.0 + p.norm()) {
                return Err(Error::InvalidArgument(format!("projection {idx} is not Hermitian")));
            }
            if (p * p - p).norm() > 1e-12 * (1.0 + p.norm()) {
                return Err(Error::InvalidArgument(format!("projection {idx} is not idempotent")));
            }
            let rank = p.trace().re.round() as usize;
            if idx > 0 && rank <= last_rank {
                return Err(Error::InvalidArgument("projection ranks must strictly increase".into()));
            }
            last_rank = rank;
        }
        let last = projections.last().unwrap();
        if (last - CMatrix::identity(n, n)).norm() > 1e-12 * (n as f64) {
            return Err(Error::InvalidArgument("last projection must be the identity".into()));
        }
        Ok(Self { projections })
    }

    /// Chain of projections onto the leading eigenvectors of `S^H S` at the
    /// shift `mu`, one per requested rank (the full rank is appended when
    /// missing).
    pub fn leading_transfer_modes(a: &BlockOperator, mu: Complex64, ranks: &[usize]) -> Result<Self> {
        let n_plus = a.structure().n_plus();
        let td = transfer_data(a, mu)?;
        let gram = td.s.adjoint() * &td.s;
        let (_, vectors) = linalg::hermitian_eigen_desc(&gram);
        let mut wanted: Vec<usize> = ranks.to_vec();
        if wanted.last() != Some(&n_plus) {
            wanted.push(n_plus);
        }
        let mut projections = Vec::with_capacity(wanted.len());
        for &rank in &wanted {
            if rank == 0 || rank > n_plus {
                return Err(Error::InvalidArgument(format!(
                    "rank {rank} out of range 1..={n_plus}"
                )));
            }
            if rank == n_plus {
                projections.push(CMatrix::identity(n_plus, n_plus));
            } else {
                let v = vectors.columns(0, rank).into_owned();
                projections.push(&v * v.adjoint());
            }
        }
        Self::new(projections)
    }

    /// Doubling rank chain 2, 4, ..., capped and terminated at `n_plus`.
    pub fn doubling(a: &BlockOperator, mu: Complex64) -> Result<Self> {
        let n_plus = a.structure().n_plus();
        let mut ranks = Vec::new();
        let mut r = 2usize;
        while r < n_plus {
            ranks.push(r);
            r *= 2;
        }
        ranks.push(n_plus);
        Self::leading_transfer_modes(a, mu, &ranks)
    }

    pub fn projections(&self) -> &[CMatrix] {
        &self.projections
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.projections.iter().map(|p| p.trace().re.round() as usize).collect()
    }
}

/// Orthonormal basis of the range of an orthogonal projection.
fn range_basis(p: &CMatrix, rank: usize) -> CMatrix {
    if rank == p.nrows() {
        return CMatrix::identity(rank, rank);
    }
    let q = linalg::orthonormal_basis(p);
    debug_assert_eq!(q.ncols(), rank);
    q
}

/// Solves the compressed problem for every stage of the scheme and embeds
/// each stage solution back as an angle operator on the full space.
///
/// The final entry corresponds to the identity projection and solves the
/// uncompressed problem.
pub fn galerkin_sequence(
    a: &BlockOperator,
    scheme: &GalerkinScheme,
    mu: Complex64,
    opts: &SolverOptions,
) -> Result<Vec<AngleOperator>> {
    opts.validate()?;
    let ks = a.structure();
    let n_minus = ks.n_minus();
    let mut out = Vec::with_capacity(scheme.projections.len());
    for (stage, p) in scheme.projections.iter().enumerate() {
        let rank = p.trace().re.round() as usize;
        let v = range_basis(p, rank);
        let stage_result: Result<AngleOperator> = (|| {
            let structure = KreinStructure::new(rank, n_minus)?;
            let compressed = BlockOperator::from_blocks(
                structure,
                &(v.adjoint() * a.a11() * &v),
                &(v.adjoint() * a.a12()),
                &(a.a21() * &v),
                &a.a22(),
            )?;
            let sol = AutoStrategy.solve(&compressed, Some(mu), opts)?;
            // embed: the stage graph lives over range(P); K_n = K_stage V^H
            let embedded = sol.angle.matrix() * v.adjoint();
            AngleOperator::new(ks, embedded)
        })();
        match stage_result {
            Ok(angle) => out.push(angle),
            Err(e) => {
                return Err(Error::GalerkinStage { stage, rank, source: Box::new(e) });
            }
        }
    }
    Ok(out)
}

/// Strategy wrapper: runs the rank chain (doubling by default) and returns
/// the full-rank stage.
#[derive(Default)]
pub struct GalerkinStrategy {
    /// Explicit rank chain; the doubling chain is used when empty.
    pub ranks: Vec<usize>,
}

impl GalerkinStrategy {
    pub fn with_ranks(ranks: Vec<usize>) -> Self {
        Self { ranks }
    }

    /// Evenly spaced chain of `steps` ranks ending at full rank.
    pub fn with_steps(steps: usize, n_plus: usize) -> Self {
        let steps = steps.max(1);
        let mut ranks: Vec<usize> = (1..=steps)
            .map(|i| ((i * n_plus) as f64 / steps as f64).round() as usize)
            .map(|r| r.clamp(1, n_plus))
            .collect();
        ranks.dedup();
        Self { ranks }
    }
}

impl SolveStrategy for GalerkinStrategy {
    fn name(&self) -> &'static str {
        "galerkin"
    }

    fn solve(&self, a: &BlockOperator, mu: Option<Complex64>, opts: &SolverOptions) -> Result<Solution> {
        let mu = resolve_shift(a, mu)?;
        let scheme = if self.ranks.is_empty() {
            GalerkinScheme::doubling(a, mu)?
        } else {
            GalerkinScheme::leading_transfer_modes(a, mu, &self.ranks)?
        };
        let stages = galerkin_sequence(a, &scheme, mu, opts)?;
        let angle = stages.last().expect("scheme is nonempty").clone();
        Solution::assemble(a, angle, mu, "galerkin", Some(stages.len()))
    }
}
