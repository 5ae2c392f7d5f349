//! Bures-Wasserstein curvature and quotient structure
//! `π: GL(n) → SPD(n)`, `π(A) = AAᵀ`, with the Frobenius metric upstairs.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::symlin::{sylvester_lift, SpdMatrix, SymMatrix};

/// `R(X, Y, X, Y) = (3/2) Σᵢⱼ dᵢdⱼ/(dᵢ + dⱼ) ([X⁰', Y⁰']ᵢⱼ)²` with `X⁰`, `Y⁰`
/// the Sylvester lifts in the eigenbasis of `Σ`.
pub fn bw_riemann_diag(sigma: &SpdMatrix, x: &SymMatrix, y: &SymMatrix) -> Result<f64> {
    sigma.check_dim(x)?;
    sigma.check_dim(y)?;
    let e = sigma.eig();
    let d = &e.d;
    let x0 = e.to_eigenbasis(&sylvester_lift(sigma, x));
    let y0 = e.to_eigenbasis(&sylvester_lift(sigma, y));
    let c = &x0 * &y0 - &y0 * &x0;
    let n = d.len();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += d[i] * d[j] / (d[i] + d[j]) * c[(i, j)].powi(2);
        }
    }
    Ok(1.5 * acc)
}

/// Residuals of the quotient description at a fiber point `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientReport {
    /// Horizontal lift `X⁰A`.
    pub lift: DMatrix<f64>,
    /// `‖d_Aπ(X⁰A) − X‖ / ‖X‖`, with `d_Aπ(V) = VAᵀ + AVᵀ`.
    pub projection_residual: f64,
    /// Largest cosine `|⟨X⁰A, SA^{-T}⟩_F| / (‖X⁰A‖ ‖SA^{-T}‖)` over the skew
    /// basis `S`.
    pub vertical_max: f64,
    /// `|‖X⁰A‖²_F − g^BW_Σ(X, X)| / g^BW_Σ(X, X)`.
    pub norm_gap: f64,
}

impl QuotientReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.projection_residual <= tol && self.vertical_max <= tol && self.norm_gap <= tol
    }
}

pub fn bw_quotient_check(a: &DMatrix<f64>, x: &SymMatrix) -> Result<QuotientReport> {
    let n = a.nrows();
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.ncols(),
        });
    }
    x.check_dim(n)?;
    let sv = a.singular_values();
    let (smin, smax) = (sv.min(), sv.max());
    if !(smin > 1e-12 * smax) {
        return Err(Error::Conditioning(format!("fiber point is singular (singular values in [{smin:e}, {smax:e}])")));
    }
    let sigma = SpdMatrix::from_matrix(a * a.transpose())?;
    let x0 = sylvester_lift(&sigma, x);
    let lift = x0.as_matrix() * a;
    let push = &lift * a.transpose() + a * lift.transpose();
    let projection_residual = (push - x.as_matrix()).norm() / x.norm().max(f64::MIN_POSITIVE);

    let a_inv_t = a.clone().try_inverse().expect("checked invertible").transpose();
    let mut vertical_max: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let mut s = DMatrix::zeros(n, n);
            s[(i, j)] = std::f64::consts::FRAC_1_SQRT_2;
            s[(j, i)] = -std::f64::consts::FRAC_1_SQRT_2;
            let v = s * &a_inv_t;
            let scale = (lift.norm() * v.norm()).max(f64::MIN_POSITIVE);
            vertical_max = vertical_max.max(lift.dot(&v).abs() / scale);
        }
    }
    let g = 0.5 * x.dot(&x0);
    Ok(QuotientReport {
        norm_gap: (lift.norm_squared() - g).abs() / g.max(f64::MIN_POSITIVE),
        lift,
        projection_residual,
        vertical_max,
    })
}
