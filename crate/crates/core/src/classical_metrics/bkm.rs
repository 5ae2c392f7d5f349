//! Bogoliubov-Kubo-Mori metric `g_Σ(X, Y) = tr(X d_Σlog(Y))`.
//!
//! In the eigenbasis the metric weights are `mᵢⱼ = ∫₀^∞ (dᵢ+t)⁻¹(dⱼ+t)⁻¹ dt`,
//! the first divided difference of `log`, and its derivative involves
//! `mᵢⱼₖ = ∫₀^∞ (dᵢ+t)⁻¹(dⱼ+t)⁻¹(dₖ+t)⁻¹ dt = −log^[2](dᵢ, dⱼ, dₖ)`.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::kernel_family::log_fn;
use crate::symlin::{divided_difference, univariate_diff, EigenDecomp, SpdMatrix, SymMatrix};

/// `log(x/y)/(x − y)`, `1/x` on the diagonal.
pub fn bkm_m2(x: f64, y: f64) -> f64 {
    divided_difference(log_fn(), x, y)
}

/// `∫₀^∞ (x+t)⁻¹(y+t)⁻¹(z+t)⁻¹ dt`, symmetric, `1/(2x²)` at `x = y = z`.
pub fn bkm_m3(x: f64, y: f64, z: f64) -> f64 {
    let mut v = [x, y, z];
    v.sort_by(f64::total_cmp);
    let [a, b, c] = v;
    if c - a > 1e-5 * c {
        return (bkm_m2(a, b) - bkm_m2(b, c)) / (c - a);
    }
    // expansion about the mean: Σₖ (−1)ᵏ hₖ(e) / ((k + 2) uᵏ⁺²), h₁ = 0
    let u = (a + b + c) / 3.0;
    let e = [a - u, b - u, c - u];
    let h2 = e[0] * e[0] + e[1] * e[1] + e[2] * e[2] + e[0] * e[1] + e[0] * e[2] + e[1] * e[2];
    let h3 = {
        let mut s = 0.0;
        for i in 0..3 {
            for j in i..3 {
                for k in j..3 {
                    s += e[i] * e[j] * e[k];
                }
            }
        }
        s
    };
    let u2 = u * u;
    1.0 / (2.0 * u2) + h2 / (4.0 * u2 * u2) - h3 / (5.0 * u2 * u2 * u)
}

/// `d_Σlog(X)`: the covector of `X` under the BKM metric.
pub fn bkm_g(sigma: &SpdMatrix, x: &SymMatrix) -> Result<SymMatrix> {
    univariate_diff(log_fn(), sigma, x)
}

pub fn bkm_metric(sigma: &SpdMatrix, x: &SymMatrix, y: &SymMatrix) -> Result<f64> {
    Ok(x.dot(&bkm_g(sigma, y)?))
}

fn dg_eigen(d: &[f64], xp: &DMatrix<f64>, yp: &DMatrix<f64>) -> DMatrix<f64> {
    let n = d.len();
    DMatrix::from_fn(n, n, |i, j| {
        -(0..n)
            .map(|k| bkm_m3(d[i], d[j], d[k]) * (xp[(i, k)] * yp[(k, j)] + yp[(i, k)] * xp[(k, j)]))
            .sum::<f64>()
    })
}

/// `d_Σg(X)(Y) = d²log_Σ(X, Y)`, with
/// `[·]'ᵢⱼ = −Σₖ mᵢⱼₖ (X'ᵢₖY'ₖⱼ + Y'ᵢₖX'ₖⱼ)`.
pub fn bkm_dg(sigma: &SpdMatrix, x: &SymMatrix, y: &SymMatrix) -> Result<SymMatrix> {
    sigma.check_dim(x)?;
    sigma.check_dim(y)?;
    let e = sigma.eig();
    let m = dg_eigen(e.d.as_slice(), &e.to_eigenbasis(x), &e.to_eigenbasis(y));
    Ok(e.from_eigenbasis(&m))
}

/// `K(X, Y) = g⁻¹(d g(X)(Y))` in the eigenbasis.
fn k_eigen(d: &[f64], xp: &DMatrix<f64>, yp: &DMatrix<f64>) -> DMatrix<f64> {
    let m = dg_eigen(d, xp, yp);
    DMatrix::from_fn(d.len(), d.len(), |i, j| m[(i, j)] / bkm_m2(d[i], d[j]))
}

/// `∂_XY + ½ g⁻¹(d_Σg(X)(Y))`.
pub fn bkm_connection(sigma: &SpdMatrix, x: &SymMatrix, y: &SymMatrix, dy: &SymMatrix) -> Result<SymMatrix> {
    sigma.check_dim(x)?;
    sigma.check_dim(y)?;
    sigma.check_dim(dy)?;
    let e = sigma.eig();
    let k = k_eigen(e.d.as_slice(), &e.to_eigenbasis(x), &e.to_eigenbasis(y));
    Ok(dy + &e.from_eigenbasis(&k).scale(0.5))
}

/// `R(X, Y)Z = ¼K(Y, K(X, Z)) − ¼K(X, K(Y, Z))` with `K(X, Y) = g⁻¹ d g(X)(Y)`
/// (Hessian-metric form).
pub fn bkm_riemann(sigma: &SpdMatrix, x: &SymMatrix, y: &SymMatrix, z: &SymMatrix) -> Result<SymMatrix> {
    sigma.check_dim(x)?;
    sigma.check_dim(y)?;
    sigma.check_dim(z)?;
    let e: &EigenDecomp = sigma.eig();
    let d = e.d.as_slice();
    let (xp, yp, zp) = (e.to_eigenbasis(x), e.to_eigenbasis(y), e.to_eigenbasis(z));
    let a = k_eigen(d, &yp, &k_eigen(d, &xp, &zp));
    let b = k_eigen(d, &xp, &k_eigen(d, &yp, &zp));
    Ok(e.from_eigenbasis(&((a - b) * 0.25)))
}

/// `(d_Σlog)⁻¹ d²log_Σ(X, Y)`.
pub(super) fn log_k(sigma: &SpdMatrix, x: &SymMatrix, y: &SymMatrix) -> SymMatrix {
    let e = sigma.eig();
    let k = k_eigen(e.d.as_slice(), &e.to_eigenbasis(x), &e.to_eigenbasis(y));
    e.from_eigenbasis(&k)
}
