//! Seeded generators for probe vectors and structured random operators.
//!
//! Everything here is deterministic given the seed, which the test suites and
//! the command-line front end rely on for reproducible runs.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::krein::{BlockOperator, KreinStructure};
use crate::linalg::{self, c, CMatrix, CVector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller on open-interval uniforms
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn complex_normal(rng: &mut ChaCha8Rng) -> Complex64 {
    c(standard_normal(rng), standard_normal(rng))
}

pub fn complex_vector(rng: &mut ChaCha8Rng, len: usize) -> CVector {
    CVector::from_fn(len, |_, _| complex_normal(rng))
}

pub fn complex_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

pub fn hermitian_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    linalg::hermitian_part(&complex_matrix(rng, n, n))
}

/// Random positive semidefinite matrix `R R^H / n`.
pub fn psd_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let r = complex_matrix(rng, n, n);
    (&r * r.adjoint()).unscale(n as f64)
}

/// Random contraction with operator norm exactly `norm`.
pub fn contraction(rng: &mut ChaCha8Rng, rows: usize, cols: usize, norm: f64) -> CMatrix {
    let m = complex_matrix(rng, rows, cols);
    let top = linalg::op_norm(&m);
    m * c(norm / top, 0.0)
}

/// Random unitary from the QR factor of a Gaussian matrix.
pub fn unitary(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    complex_matrix(rng, n, n).qr().q()
}

/// Random operator dissipative in the Krein space: `A = J (H + i Q)` with `H`
/// Hermitian and `Q` positive semidefinite shifted by `defect_floor`.
///
/// The dissipativity defect of the result is at least `defect_floor`
/// (exactly zero floor gives a selfadjoint-plus-PSD perturbation).
pub fn dissipative_operator(
    rng: &mut ChaCha8Rng,
    ks: KreinStructure,
    defect_floor: f64,
) -> BlockOperator {
    let n = ks.dim();
    let h = hermitian_matrix(rng, n);
    let mut q = psd_matrix(rng, n);
    for i in 0..n {
        q[(i, i)] += c(defect_floor, 0.0);
    }
    let ja = &h + q.map(|z| z * c(0.0, 1.0));
    BlockOperator::new(ks, ks.signature_matrix() * ja).expect("square by construction")
}

/// Random operator selfadjoint in the Krein space (`J A` Hermitian).
pub fn j_selfadjoint_operator(rng: &mut ChaCha8Rng, ks: KreinStructure) -> BlockOperator {
    let h = hermitian_matrix(rng, ks.dim());
    BlockOperator::new(ks, ks.signature_matrix() * h).expect("square by construction")
}
