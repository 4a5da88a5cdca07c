//! Invariant maximal nonnegative subspaces of dissipative block operators in
//! finite-dimensional Krein spaces.
//!
//! The crate computes the angle operator `K` whose graph
//! `{(x_+, K x_+)}` is an invariant maximal nonnegative subspace of a block
//! operator dissipative in the indefinite metric, then analyzes the
//! restriction to that subspace: spectrum location, semigroup growth, and
//! sector margins. Three interchangeable solve strategies (fixed-point,
//! spectral, Galerkin) sit behind a name-indexed registry; see
//! [`solver::StrategyRegistry`].

pub mod analysis;
pub mod error;
pub mod krein;
pub mod linalg;
pub mod model;
pub mod riccati;
pub mod sampling;
pub mod schur;
pub mod solver;
pub mod transfer;

pub use error::{Error, Result};
pub use krein::{
    angle_from_subspace, dissipativity_defect, indefinite_inner, is_m_dissipative,
    nonnegativity_margin, subspace_from_angle, AngleOperator, BlockOperator, KreinStructure,
    Subspace,
};
pub use linalg::{CMatrix, CVector};
pub use solver::{
    galerkin_sequence, solve_fixed_point, spectral_angle_operator, GalerkinScheme,
    GalerkinStrategy, SolveStrategy, Solution, SolverOptions, StrategyRegistry,
};
pub use transfer::{select_shift, transfer_data, SectorPath, TransferData};
