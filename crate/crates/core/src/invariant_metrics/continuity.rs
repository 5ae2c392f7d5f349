use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::symlin::SpdMatrix;

/// Relative eigenvalue spacing below which two eigenvalues of `Σ` are
/// considered equal and the eigenvector bound is not engaged.
pub const SPACING_TOL: f64 = 1e-6;

/// Eigenvalue and eigenvector perturbation quantities for a pair `(Σ, Λ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuityBounds {
    /// `‖D − Δ‖_F` with both spectra in ascending order.
    pub dist_eigs: f64,
    /// `‖Σ − Λ‖_F`.
    pub dist_mats: f64,
    /// `‖P − Q‖_F²` for the aligned diagonalizer `P` of `Σ`.
    pub eigvec_lhs: Option<f64>,
    /// `4 √(n/m) ‖Σ − Λ‖_F`, `m` the smallest squared eigenvalue gap of `Σ`.
    pub eigvec_rhs: Option<f64>,
    /// Diagonalizer of `Σ` aligned with `q`.
    pub p: DMatrix<f64>,
    pub q: DMatrix<f64>,
    pub notice: Option<String>,
}

impl ContinuityBounds {
    pub fn eigenvalue_bound_holds(&self) -> bool {
        self.dist_eigs <= self.dist_mats * (1.0 + 1e-12) + 1e-15
    }

    /// True when the eigenvector bound holds or was not engaged.
    pub fn eigenvector_bound_holds(&self) -> bool {
        match (self.eigvec_lhs, self.eigvec_rhs) {
            (Some(l), Some(r)) => l <= r,
            _ => true,
        }
    }
}

/// Orthogonal factor `R` of the polar decomposition `W = S R`.
pub fn polar_orthogonal(w: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = w.clone().svd(true, true);
    let u = svd.u.expect("left singular vectors");
    let vt = svd.v_t.expect("right singular vectors");
    u * vt
}

/// Bounds with `Q` taken from the eigendecomposition of `Λ`.
pub fn eig_continuity_bounds(sigma: &SpdMatrix, lambda: &SpdMatrix) -> Result<ContinuityBounds> {
    let q = lambda.eig().p.clone();
    eig_continuity_bounds_with(sigma, lambda, &q)
}

/// Builds `P = P₀ R` from `U = P₀ᵀ Q`: `W` is the block-diagonal part of `U`
/// over the eigenvalue clusters of `Σ` and `R` the orthogonal polar factor of
/// `W`. `q` must diagonalize `Λ` with ascending eigenvalues.
pub fn eig_continuity_bounds_with(
    sigma: &SpdMatrix,
    lambda: &SpdMatrix,
    q: &DMatrix<f64>,
) -> Result<ContinuityBounds> {
    let n = sigma.n();
    if lambda.n() != n || q.nrows() != n || q.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: lambda.n(),
        });
    }
    let d = sigma.eigenvalues();
    let delta = lambda.eigenvalues();
    let dist_eigs = d.iter().zip(delta).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let dist_mats = (sigma.as_matrix() - lambda.as_matrix()).norm();

    // clusters of (numerically) repeated eigenvalues of Σ
    let scale = d[n - 1];
    let mut clusters: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for k in 1..=n {
        if k == n || d[k] - d[k - 1] > SPACING_TOL * scale {
            clusters.push((start, k));
            start = k;
        }
    }

    let p0 = &sigma.eig().p;
    let u = p0.transpose() * q;
    let mut r = DMatrix::zeros(n, n);
    for &(a, b) in &clusters {
        let w = u.view((a, a), (b - a, b - a)).into_owned();
        r.view_mut((a, a), (b - a, b - a)).copy_from(&polar_orthogonal(&w));
    }
    let p = p0 * r;

    let repeated = clusters.iter().any(|&(a, b)| b - a > 1);
    let (lhs, rhs, notice) = if repeated || n < 2 {
        (
            None,
            None,
            Some(if n < 2 {
                "n = 1: no eigenvalue gap, eigenvector bound skipped".to_string()
            } else {
                "repeated eigenvalues in Σ: eigenvector bound skipped".to_string()
            }),
        )
    } else {
        let m = d.windows(2).map(|w| (w[1] - w[0]).powi(2)).fold(f64::INFINITY, f64::min);
        let lhs = (&p - q).norm_squared();
        let rhs = 4.0 * (n as f64 / m).sqrt() * dist_mats;
        (Some(lhs), Some(rhs), None)
    };

    Ok(ContinuityBounds {
        dist_eigs,
        dist_mats,
        eigvec_lhs: lhs,
        eigvec_rhs: rhs,
        p,
        q: q.clone(),
        notice,
    })
}
