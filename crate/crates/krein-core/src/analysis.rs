//! Analysis of the restriction of a block operator to the invariant graph
//! subspace: spectrum location, resolvent-correction decay, semigroup growth
//! estimates, and a field-of-values sector certificate.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::krein::{dissipativity_defect, AngleOperator, BlockOperator};
use crate::linalg::{self, c, CMatrix};
use crate::riccati;
use crate::schur::schur_decompose;
use crate::transfer::{transfer_data, TransferData};

/// Residual gate on the angle operator before a restriction is formed.
pub const RESTRICT_RESIDUAL_TOL: f64 = 1e-8;

/// Agreement required between the two computations of the restricted matrix.
pub const CROSS_CHECK_TOL: f64 = 1e-10;

/// Defect floor below which exponential decay is not certified.
pub const DECAY_DEFECT_MIN: f64 = 1e-8;

/// The restriction `A|_{graph(K)}` written in the coordinates of the positive
/// component.
#[derive(Debug, Clone)]
pub struct RestrictedOperator {
    matrix: CMatrix,
    source: BlockOperator,
    angle: AngleOperator,
    transfer: TransferData,
    cross_check: f64,
    q_inverse_norm: f64,
}

impl RestrictedOperator {
    /// The matrix of the restriction, `A11 + A12 K`.
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn source(&self) -> &BlockOperator {
        &self.source
    }

    pub fn angle(&self) -> &AngleOperator {
        &self.angle
    }

    pub fn mu(&self) -> Complex64 {
        self.transfer.mu
    }

    /// Relative disagreement between `A11 + A12 K` and `S + G L`.
    pub fn cross_check(&self) -> f64 {
        self.cross_check
    }

    /// Norm of the inverse coordinate chart `x_+ -> (x_+, K x_+)`; bounded by
    /// 2 for any contraction.
    pub fn q_inverse_norm(&self) -> f64 {
        self.q_inverse_norm
    }

    pub fn norm(&self) -> f64 {
        linalg::op_norm(&self.matrix)
    }
}

/// Forms the restriction in `x_+` coordinates, computing it both as
/// `A11 + A12 K` and through the transfer data as `S + G (A22 - mu)(F + K)`
/// and insisting the two agree.
pub fn restrict(a: &BlockOperator, k: &AngleOperator, mu: Complex64) -> Result<RestrictedOperator> {
    let td = transfer_data(a, mu)?;
    let residual = riccati::riccati_residual(a, &td, k);
    if residual > RESTRICT_RESIDUAL_TOL {
        return Err(Error::NotInvariant { residual });
    }
    let direct = a.a11() + a.a12() * k.matrix();
    let m = a.structure().n_minus();
    let l = (a.a22() - CMatrix::from_diagonal_element(m, m, mu)) * (&td.f + k.matrix());
    let via_transfer = &td.s + &td.g * l;
    let cross_check = linalg::op_norm(&(&direct - via_transfer)) / (1.0 + linalg::op_norm(&direct));
    if cross_check > CROSS_CHECK_TOL {
        return Err(Error::CertificationFailed(format!(
            "restriction cross-check failed: disagreement {cross_check:.3e}"
        )));
    }
    let q_inverse_norm = (1.0 + k.norm().powi(2)).sqrt();
    Ok(RestrictedOperator {
        matrix: direct,
        source: a.clone(),
        angle: k.clone(),
        transfer: td,
        cross_check,
        q_inverse_norm,
    })
}

/// Spectrum facts about the restriction; grown incrementally by the
/// semigroup and sector checks.
#[derive(Debug, Clone)]
pub struct SpectralReport {
    pub eigenvalues: Vec<Complex64>,
    /// Smallest imaginary part over the eigenvalues.
    pub halfplane_margin: f64,
    /// Fitted slope of the log semigroup norm, per unit time.
    pub growth_bound: Option<f64>,
    pub decay_certified: bool,
    pub sector_margin: Option<f64>,
}

impl SpectralReport {
    /// Upper-half-plane certificate at the standard tolerance.
    pub fn halfplane_certified(&self) -> bool {
        self.halfplane_margin >= -1e-8
    }
}

/// Eigenvalues of the restriction and their half-plane margin.
pub fn spectrum_halfplane_check(r: &RestrictedOperator) -> Result<SpectralReport> {
    let form = schur_decompose(r.matrix())?;
    let mut eigenvalues = form.eigenvalues();
    eigenvalues.sort_by(|a, b| b.im.total_cmp(&a.im).then(a.re.total_cmp(&b.re)));
    let halfplane_margin = eigenvalues.iter().map(|e| e.im).fold(f64::INFINITY, f64::min);
    Ok(SpectralReport {
        eigenvalues,
        halfplane_margin,
        growth_bound: None,
        decay_certified: false,
        sector_margin: None,
    })
}

/// The correction factor `T(alpha) = G (1 - K G)^{-1} K (S - mu)(S - alpha)^{-1}`
/// in the factorization of the shifted restriction through the transfer
/// function.
pub fn resolvent_correction(r: &RestrictedOperator, alpha: Complex64) -> Result<CMatrix> {
    let td = &r.transfer;
    let p = td.s.nrows();
    let m = td.f.nrows();
    let kg = r.angle.matrix() * &td.g;
    if linalg::op_norm(&kg) >= 1.0 {
        return Err(Error::InvalidArgument(
            "coupling K G must be a strict contraction".into(),
        ));
    }
    let s_alpha = &td.s - CMatrix::from_diagonal_element(p, p, alpha);
    if linalg::condition_estimate(&s_alpha) > 1e12 {
        return Err(Error::AlphaInSpectrum { alpha });
    }
    let cross_inv = linalg::inverse(&(CMatrix::identity(m, m) - kg))?;
    let s_mu = &td.s - CMatrix::from_diagonal_element(p, p, td.mu);
    let s_alpha_inv = linalg::inverse(&s_alpha)?;
    Ok(&td.g * cross_inv * r.angle.matrix() * s_mu * s_alpha_inv)
}

/// Residual of `(A_plus - alpha) = (1 + T(alpha))(S - alpha)` in the positive
/// coordinates.
pub fn correction_identity_residual(r: &RestrictedOperator, alpha: Complex64) -> Result<f64> {
    let t = resolvent_correction(r, alpha)?;
    let p = r.matrix.nrows();
    let ident = CMatrix::identity(p, p);
    let lhs = &r.matrix - CMatrix::from_diagonal_element(p, p, alpha);
    let s_alpha = &r.transfer.s - CMatrix::from_diagonal_element(p, p, alpha);
    Ok(linalg::op_norm(&(lhs - (ident + t) * s_alpha)))
}

/// Norm profile `tau -> ||T(-i tau)||` down the negative imaginary axis.
pub fn resolvent_correction_decay(r: &RestrictedOperator, tau_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    tau_grid
        .iter()
        .map(|&tau| {
            let t = resolvent_correction(r, c(0.0, -tau))?;
            Ok((tau, linalg::op_norm(&t)))
        })
        .collect()
}

/// Semigroup norm samples and the fitted growth bound.
#[derive(Debug, Clone)]
pub struct GrowthEstimate {
    /// Least-squares slope of `log ||exp(i t A_plus)||` over the tail half of
    /// the grid.
    pub growth_bound: f64,
    /// Exponential-stability certificate: requires a strictly positive
    /// dissipativity defect delta and a fitted bound at most `-delta/2`.
    pub decay_certified: bool,
    /// `(t, log ||exp(i t A_plus)||)` samples.
    pub samples: Vec<(f64, f64)>,
}

/// Default time horizon `20 / max(1, ||A_plus||)`.
pub fn default_t_max(r: &RestrictedOperator) -> f64 {
    20.0 / r.norm().max(1.0)
}

/// Samples `||exp(i t A_plus)||` on a uniform grid over `[0, t_max]` and fits
/// the growth bound on the tail half, skipping transients.
pub fn semigroup_growth(r: &RestrictedOperator, t_max: f64, grid_points: usize) -> Result<GrowthEstimate> {
    if !(t_max > 0.0) {
        return Err(Error::InvalidArgument("t_max must be positive".into()));
    }
    if grid_points < 4 {
        return Err(Error::InvalidArgument("need at least 4 grid points".into()));
    }
    let generator = r.matrix().map(|z| z * c(0.0, 1.0));
    let mut samples = Vec::with_capacity(grid_points);
    for j in 0..grid_points {
        let t = t_max * j as f64 / (grid_points - 1) as f64;
        let semigroup = generator.map(|z| z * c(t, 0.0)).exp();
        let norm = linalg::op_norm(&semigroup).max(f64::MIN_POSITIVE);
        samples.push((t, norm.ln()));
    }
    let tail = &samples[grid_points / 2..];
    let growth_bound = least_squares_slope(tail);
    let defect = dissipativity_defect(r.source());
    let decay_certified = defect >= DECAY_DEFECT_MIN && growth_bound <= -defect / 2.0 + 1e-6;
    Ok(GrowthEstimate { growth_bound, decay_certified, samples })
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mean_t = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let num: f64 = points.iter().map(|p| (p.0 - mean_t) * (p.1 - mean_y)).sum();
    let den: f64 = points.iter().map(|p| (p.0 - mean_t).powi(2)).sum();
    num / den
}

/// Boundary points of the numerical range by support sampling over
/// `directions` angles; the extreme eigenvector of the rotated Hermitian part
/// realizes the support point in each direction.
pub fn field_of_values(m: &CMatrix, directions: usize) -> Vec<Complex64> {
    let mut points = Vec::with_capacity(directions);
    for k in 0..directions {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / directions as f64;
        let rotated = m.map(|z| z * Complex64::from_polar(1.0, -theta));
        let herm = linalg::hermitian_part(&rotated);
        let eigen = nalgebra::SymmetricEigen::new(herm);
        let mut best = 0usize;
        for i in 1..eigen.eigenvalues.len() {
            if eigen.eigenvalues[i] > eigen.eigenvalues[best] {
                best = i;
            }
        }
        let x = eigen.eigenvectors.column(best).into_owned();
        let mx = m * &x;
        // Rayleigh point x^H M x with a unit eigenvector
        points.push(x.dotc(&mx));
    }
    points
}

/// Sector margin of `i A_plus - eps`: distance of its numerical range to the
/// closed right half-plane (negative when the range crosses into it).
///
/// At matrix scale every operator generates a holomorphic semigroup, so this
/// is a quantitative surrogate: the margin reported is how much room the
/// rotated range leaves after the `eps` shift, computed from 360-direction
/// support sampling.
pub fn sector_check(r: &RestrictedOperator, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    let p = r.matrix.nrows();
    let shifted = r.matrix.map(|z| z * c(0.0, 1.0)) - CMatrix::from_diagonal_element(p, p, c(eps, 0.0));
    let points = field_of_values(&shifted, 360);
    let max_re = points.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    Ok(-max_re)
}

/// Composes the half-plane, semigroup, and sector checks into one report.
pub fn full_report(
    r: &RestrictedOperator,
    t_max: Option<f64>,
    grid_points: usize,
    sector_eps: f64,
) -> Result<SpectralReport> {
    let mut report = spectrum_halfplane_check(r)?;
    let growth = semigroup_growth(r, t_max.unwrap_or_else(|| default_t_max(r)), grid_points)?;
    report.growth_bound = Some(growth.growth_bound);
    report.decay_certified = growth.decay_certified;
    report.sector_margin = Some(sector_check(r, sector_eps)?);
    Ok(report)
}
