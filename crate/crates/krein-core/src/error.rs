use num_complex::Complex64;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shift {mu} leaves the lower-right block ill-conditioned (condition estimate {cond:.3e})")]
    IllConditionedShift { mu: Complex64, cond: f64 },

    #[error("singular resolvent at grid point tau = {tau}")]
    SingularResolvent { tau: f64 },

    #[error("shift alpha = {alpha} lies in the spectrum of the transfer function")]
    AlphaInSpectrum { alpha: Complex64 },

    #[error("subspace is not a graph over the positive component (smallest singular value {sigma_min:.3e})")]
    NotAGraph { sigma_min: f64 },

    #[error("operator is not dissipative in the Krein space (defect {defect:.3e})")]
    NotDissipative { defect: f64 },

    #[error("coupling norm {norm:.3e} at mu = {mu} is not below 1/2; increase |mu| along the imaginary axis")]
    CouplingTooLarge { mu: Complex64, norm: f64 },

    #[error("no admissible shift found up to tau = {tau_max:.3e}")]
    ShiftSelectionFailed { tau_max: f64 },

    #[error("fixed-point iteration did not converge after {iterations} iterations (last residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("spectral selection degenerate: eigenvalue cluster straddles the selection cut (gap {gap:.3e})")]
    SpectralSelectionDegenerate { gap: f64 },

    #[error("Schur decomposition failed to converge")]
    SchurFailed,

    #[error("angle operator norm {norm} exceeds the contraction bound")]
    NotAContraction { norm: f64 },

    #[error("angle operator is not invariant to tolerance (residual {residual:.3e})")]
    NotInvariant { residual: f64 },

    #[error("certification failed: {0}")]
    CertificationFailed(String),

    #[error("galerkin stage {stage} (rank {rank}): {source}")]
    GalerkinStage {
        stage: usize,
        rank: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("no solver strategy registered under the name {0:?}")]
    UnknownStrategy(String),
}

pub type Result<T> = std::result::Result<T, Error>;
