//! Contraction iteration on the shift-parametrized Riccati equation,
//! `K <- -F + (A22 - mu)^{-1} (1 - K G)^{-1} K (S - mu)`, started at K = 0
//! and projected back onto the unit ball after every step.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::krein::{dissipativity_defect, AngleOperator, BlockOperator, DISSIPATIVITY_TOL};
use crate::linalg::{self, CMatrix};
use crate::riccati;
use crate::solver::{resolve_shift, Solution, SolveStrategy, SolverOptions};
use crate::transfer::{transfer_data, TransferData};

pub struct FixedPointStrategy;

impl SolveStrategy for FixedPointStrategy {
    fn name(&self) -> &'static str {
        "fixed_point"
    }

    fn solve(&self, a: &BlockOperator, mu: Option<Complex64>, opts: &SolverOptions) -> Result<Solution> {
        let mu = resolve_shift(a, mu)?;
        let (angle, iterations, td) = iterate(a, mu, opts)?;
        Ok(Solution::assemble_with(a, &td, angle, "fixed_point", Some(iterations)))
    }
}

/// Runs the iteration at the given shift. Preconditions: the operator is
/// dissipative in the Krein space and `||G(mu)|| < 1/2`.
pub fn solve_fixed_point(a: &BlockOperator, mu: Complex64, opts: &SolverOptions) -> Result<AngleOperator> {
    iterate(a, mu, opts).map(|(k, _, _)| k)
}

fn iterate(
    a: &BlockOperator,
    mu: Complex64,
    opts: &SolverOptions,
) -> Result<(AngleOperator, usize, TransferData)> {
    opts.validate()?;
    let defect = dissipativity_defect(a);
    if defect < -DISSIPATIVITY_TOL {
        return Err(Error::NotDissipative { defect });
    }
    let td = transfer_data(a, mu)?;
    let g_norm = linalg::op_norm(&td.g);
    if g_norm >= 0.5 {
        return Err(Error::CouplingTooLarge { mu, norm: g_norm });
    }

    let ks = a.structure();
    let (p, m) = (ks.n_plus(), ks.n_minus());
    let shifted_inv = linalg::inverse(&(a.a22() - CMatrix::from_diagonal_element(m, m, mu)))?;
    let s_shift = &td.s - CMatrix::from_diagonal_element(p, p, mu);
    let ident_m = CMatrix::identity(m, m);
    let relax = linalg::c(opts.relaxation, 0.0);
    let keep = linalg::c(1.0 - opts.relaxation, 0.0);

    let mut k = CMatrix::zeros(m, p);
    let mut best: Option<(CMatrix, f64)> = None;
    let mut last_residual = f64::INFINITY;
    // once below tolerance, keep polishing while each step still gains a
    // digit; stop at stagnation or at the arithmetic floor
    const STAGNATION_RATIO: f64 = 0.9;
    const RESIDUAL_FLOOR: f64 = 16.0 * f64::EPSILON;

    for iter in 1..=opts.max_iterations {
        // (1 - K G) stays within distance 1/2 of the identity, so plain LU is safe
        let cross_inv = linalg::inverse(&(&ident_m - &k * &td.g))?;
        let update = -&td.f + &shifted_inv * cross_inv * &k * &s_shift;
        let blended = &update * relax + &k * keep;
        k = linalg::clip_to_unit_ball(&blended);

        let candidate = AngleOperator::new(ks, k.clone())?;
        let residual = riccati::riccati_residual(a, &td, &candidate);
        if best.as_ref().map_or(true, |(_, r)| residual < *r) {
            best = Some((k.clone(), residual));
        }
        let best_res = best.as_ref().unwrap().1;
        if best_res < opts.tol_residual
            && (residual <= RESIDUAL_FLOOR || residual >= STAGNATION_RATIO * last_residual)
        {
            let (bk, _) = best.unwrap();
            return Ok((AngleOperator::new(ks, bk)?, iter, td));
        }
        last_residual = residual;
    }

    match best {
        Some((bk, res)) if res < opts.tol_residual => {
            Ok((AngleOperator::new(ks, bk)?, opts.max_iterations, td))
        }
        Some((_, res)) => Err(Error::NonConvergence { iterations: opts.max_iterations, residual: res }),
        None => Err(Error::NonConvergence {
            iterations: opts.max_iterations,
            residual: f64::INFINITY,
        }),
    }
}
