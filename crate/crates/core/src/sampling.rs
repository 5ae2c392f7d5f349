//! Seeded random generators for matrices, used by validation grids, the CLI
//! and the test suites.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::symlin::{SpdMatrix, SymMatrix};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `exp(U(log lo, log hi))`.
pub fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo.ln()..=hi.ln()).exp()
}

pub fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with the sign
/// of R's diagonal folded into Q).
pub fn random_orthogonal<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let qr = gaussian_matrix(rng, n, n).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Symmetric matrix with standard Gaussian entries on and above the diagonal.
pub fn random_sym<R: Rng>(rng: &mut R, n: usize) -> SymMatrix {
    let g = gaussian_matrix(rng, n, n);
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            m[(i, j)] = g[(i, j)];
            m[(j, i)] = g[(i, j)];
        }
    }
    SymMatrix::new(m)
}

/// Random symmetric matrix with unit Frobenius norm.
pub fn random_unit_sym<R: Rng>(rng: &mut R, n: usize) -> SymMatrix {
    let x = random_sym(rng, n);
    let nrm = x.norm();
    x.scale(1.0 / nrm)
}

/// `R Diag(d) Rᵀ` with `d` log-uniform in `[lo, hi]` and Haar `R`.
pub fn random_spd<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> SpdMatrix {
    let d = DVector::from_fn(n, |_, _| log_uniform(rng, lo, hi));
    let q = random_orthogonal(rng, n);
    let m = &q * DMatrix::from_diagonal(&d) * q.transpose();
    SpdMatrix::from_matrix(m).expect("random SPD sample")
}

/// Log-uniform eigenvalue vector.
pub fn random_eigenvalues<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| log_uniform(rng, lo, hi)).collect()
}
