//! Solver strategies for the angle operator of an invariant maximal
//! nonnegative subspace.
//!
//! Every method sits behind [`SolveStrategy`] and is looked up by name in a
//! [`StrategyRegistry`], so front ends can select the algorithm at runtime:
//!
//! * `fixed_point` — contraction iteration on the shift-parametrized Riccati
//!   equation;
//! * `spectral`    — ordered Schur selection of the invariant subspace, with
//!   the `A + i eps P+` regularization ladder for tie-breaking;
//! * `galerkin`    — nested compressions solved stage by stage, returning the
//!   full-rank stage;
//! * `auto`        — fixed point first, falling back to the spectral method
//!   when the iteration fails to converge or to certify.

mod fixed_point;
mod galerkin;
mod spectral;

pub use fixed_point::{solve_fixed_point, FixedPointStrategy};
pub use galerkin::{galerkin_sequence, GalerkinScheme, GalerkinStrategy};
pub use spectral::{spectral_angle_operator, SpectralStrategy};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::krein::{self, AngleOperator, BlockOperator};
use crate::riccati;
use crate::transfer::{self, TransferData};

/// Halfplane tolerance used when certifying solutions.
pub const HALFPLANE_TOL: f64 = 1e-8;

/// Invariance-residual tolerance used when certifying solutions.
pub const INVARIANCE_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub max_iterations: usize,
    pub tol_residual: f64,
    /// Blending weight in (0, 1] for the fixed-point update.
    pub relaxation: f64,
    /// Decreasing regularization schedule ending at zero.
    pub epsilon_schedule: Vec<f64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            tol_residual: 1e-10,
            relaxation: 1.0,
            epsilon_schedule: vec![1e-2, 1e-4, 1e-6, 0.0],
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument("max_iterations must be positive".into()));
        }
        if !(self.tol_residual > 0.0) {
            return Err(Error::InvalidArgument("tol_residual must be positive".into()));
        }
        if !(self.relaxation > 0.0 && self.relaxation <= 1.0) {
            return Err(Error::InvalidArgument("relaxation must lie in (0, 1]".into()));
        }
        let sched = &self.epsilon_schedule;
        if sched.is_empty() || *sched.last().unwrap() != 0.0 {
            return Err(Error::InvalidArgument("epsilon schedule must end at zero".into()));
        }
        if sched.windows(2).any(|w| w[1] >= w[0]) || sched[0] < 0.0 {
            return Err(Error::InvalidArgument("epsilon schedule must be decreasing".into()));
        }
        Ok(())
    }
}

/// A solved instance: the angle operator plus the residuals certifying it.
#[derive(Debug, Clone)]
pub struct Solution {
    pub angle: AngleOperator,
    pub mu: Complex64,
    pub method: &'static str,
    pub iterations: Option<usize>,
    pub riccati_residual: f64,
    pub pontryagin_residual: f64,
    pub invariance_residual: f64,
}

impl Solution {
    /// Assembles a solution record, computing all three residuals at `mu`.
    pub fn assemble(
        a: &BlockOperator,
        angle: AngleOperator,
        mu: Complex64,
        method: &'static str,
        iterations: Option<usize>,
    ) -> Result<Self> {
        let td = transfer::transfer_data(a, mu)?;
        Ok(Self::assemble_with(a, &td, angle, method, iterations))
    }

    pub fn assemble_with(
        a: &BlockOperator,
        td: &TransferData,
        angle: AngleOperator,
        method: &'static str,
        iterations: Option<usize>,
    ) -> Self {
        let graph = krein::subspace_from_angle(&angle);
        Self {
            riccati_residual: riccati::riccati_residual(a, td, &angle),
            pontryagin_residual: riccati::pontryagin_residual(a, &angle),
            invariance_residual: riccati::invariance_residual(a, &graph),
            angle,
            mu: td.mu,
            method,
            iterations,
        }
    }
}

/// An interchangeable solve method, addressed by name.
pub trait SolveStrategy: Send + Sync {
    fn name(&self) -> &'static str;

    /// Solves for the angle operator. `mu` overrides the default shift
    /// selection where the method needs a shift.
    fn solve(&self, a: &BlockOperator, mu: Option<Complex64>, opts: &SolverOptions) -> Result<Solution>;
}

/// Name-indexed set of solve strategies.
pub struct StrategyRegistry {
    entries: Vec<Box<dyn SolveStrategy>>,
}

impl StrategyRegistry {
    pub fn empty() -> Self {
        Self { entries: Vec::new() }
    }

    /// Registry holding the built-in methods, `auto` included.
    pub fn with_builtins() -> Self {
        let mut reg = Self::empty();
        reg.register(Box::new(FixedPointStrategy));
        reg.register(Box::new(SpectralStrategy));
        reg.register(Box::new(GalerkinStrategy::default()));
        reg.register(Box::new(AutoStrategy));
        reg
    }

    /// Registers a strategy, replacing any previous entry with the same name.
    pub fn register(&mut self, strategy: Box<dyn SolveStrategy>) {
        self.entries.retain(|e| e.name() != strategy.name());
        self.entries.push(strategy);
    }

    pub fn get(&self, name: &str) -> Option<&dyn SolveStrategy> {
        self.entries.iter().find(|e| e.name() == name).map(|e| e.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    /// Looks up `name` and solves, erroring on unknown names.
    pub fn solve(
        &self,
        name: &str,
        a: &BlockOperator,
        mu: Option<Complex64>,
        opts: &SolverOptions,
    ) -> Result<Solution> {
        self.get(name)
            .ok_or_else(|| Error::UnknownStrategy(name.to_string()))?
            .solve(a, mu, opts)
    }
}

/// Fixed point first; on non-convergence, a rejected shift, or a solution
/// that fails its certificates, the spectral method takes over.
pub struct AutoStrategy;

impl AutoStrategy {
    fn certified(a: &BlockOperator, sol: &Solution) -> bool {
        if sol.angle.norm() > 1.0 + HALFPLANE_TOL || sol.invariance_residual > INVARIANCE_TOL {
            return false;
        }
        // restricted spectrum must stay out of the open lower half-plane
        let restricted = a.a11() + a.a12() * sol.angle.matrix();
        match crate::schur::schur_decompose(&restricted) {
            Ok(form) => form
                .eigenvalues()
                .iter()
                .all(|ev| ev.im >= -HALFPLANE_TOL),
            Err(_) => false,
        }
    }
}

impl SolveStrategy for AutoStrategy {
    fn name(&self) -> &'static str {
        "auto"
    }

    fn solve(&self, a: &BlockOperator, mu: Option<Complex64>, opts: &SolverOptions) -> Result<Solution> {
        match FixedPointStrategy.solve(a, mu, opts) {
            Ok(sol) if Self::certified(a, &sol) => Ok(sol),
            Ok(_) => SpectralStrategy.solve(a, mu, opts),
            Err(Error::NotDissipative { defect }) => Err(Error::NotDissipative { defect }),
            Err(_) => SpectralStrategy.solve(a, mu, opts),
        }
    }
}

/// Default shift for solves that were not given one.
pub fn resolve_shift(a: &BlockOperator, mu: Option<Complex64>) -> Result<Complex64> {
    match mu {
        Some(mu) => Ok(mu),
        None => transfer::select_shift(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn options_validation() {
        assert!(SolverOptions::default().validate().is_ok());
        let mut o = SolverOptions::default();
        o.tol_residual = 0.0;
        assert!(o.validate().is_err());
        let mut o = SolverOptions::default();
        o.epsilon_schedule = vec![1e-2, 1e-4];
        assert!(o.validate().is_err());
        let mut o = SolverOptions::default();
        o.epsilon_schedule = vec![1e-4, 1e-2, 0.0];
        assert!(o.validate().is_err());
        let mut o = SolverOptions::default();
        o.relaxation = 1.5;
        assert!(o.validate().is_err());
    }

    #[test]
    fn registry_knows_builtins() {
        let reg = StrategyRegistry::with_builtins();
        for name in ["fixed_point", "spectral", "galerkin", "auto"] {
            assert!(reg.get(name).is_some(), "missing {name}");
        }
        assert!(reg.get("nope").is_none());
    }

    #[test]
    fn registry_replaces_by_name() {
        struct Stub;
        impl SolveStrategy for Stub {
            fn name(&self) -> &'static str {
                "spectral"
            }
            fn solve(
                &self,
                _: &BlockOperator,
                _: Option<Complex64>,
                _: &SolverOptions,
            ) -> Result<Solution> {
                Err(Error::InvalidArgument("stub".into()))
            }
        }
        let mut reg = StrategyRegistry::with_builtins();
        let before = reg.names().len();
        reg.register(Box::new(Stub));
        assert_eq!(reg.names().len(), before);
    }
}
