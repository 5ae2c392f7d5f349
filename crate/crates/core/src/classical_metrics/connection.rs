//! Levi-Civita connections and curvature of the classical metrics.

use nalgebra::DMatrix;

use super::bkm::{bkm_connection, bkm_metric, bkm_riemann, log_k};
use super::bw::bw_riemann_diag;
use super::{dsquare, square, MetricId, MetricKind};
use crate::error::{Error, Result};
use crate::inner_products::STParams;
use crate::invariant_metrics::eval;
use crate::symlin::{sylvester_lift, SpdMatrix, SymMatrix};

/// `XAY + YAX` for symmetric `X`, `Y`, `A`.
fn sandwich(x: &SymMatrix, a: &DMatrix<f64>, y: &SymMatrix) -> SymMatrix {
    let m = x.as_matrix() * a * y.as_matrix();
    SymMatrix::new(&m + m.transpose())
}

/// Covariant derivative `∇_X Y` at `Σ`, where `dY` is the coordinate
/// derivative of the field `Y` along `X`.
pub fn connection(id: &MetricId, sigma: &SpdMatrix, x: &SymMatrix, y: &SymMatrix, dy: &SymMatrix) -> Result<SymMatrix> {
    sigma.check_dim(x)?;
    sigma.check_dim(y)?;
    sigma.check_dim(dy)?;
    match id.kind {
        MetricKind::Euclidean => Ok(dy.clone()),
        MetricKind::LogEuclidean => Ok(dy + &log_k(sigma, x, y)),
        MetricKind::AffineInvariant => Ok(dy - &sandwich(x, sigma.inverse().as_matrix(), y).scale(0.5)),
        MetricKind::BuresWasserstein => {
            let (x0, y0) = (sylvester_lift(sigma, x), sylvester_lift(sigma, y));
            Ok(dy - &sandwich(&x0, sigma.as_matrix(), &y0))
        }
        MetricKind::Bkm => bkm_connection(sigma, x, y, dy),
        MetricKind::PolarAffine => {
            // pullback of the affine-invariant connection at Σ² by ΣX + XΣ
            let (xt, yt) = (dsquare(sigma, x), dsquare(sigma, y));
            let inv2 = square(sigma).inverse();
            let inner = x.anticommutator(y) - sandwich(&xt, inv2.as_matrix(), &yt).scale(0.5);
            Ok(dy + &sylvester_lift(sigma, &inner))
        }
    }
}

/// Affine-invariant `(1, 0)` curvature tensor
/// `R(X, Y, Z, T) = ½ tr(XΣ⁻¹YΣ⁻¹(ZΣ⁻¹T − TΣ⁻¹Z)Σ⁻¹)`.
pub fn ai_riemann(sigma: &SpdMatrix, x: &SymMatrix, y: &SymMatrix, z: &SymMatrix, t: &SymMatrix) -> Result<f64> {
    for m in [x, y, z, t] {
        sigma.check_dim(m)?;
    }
    let inv = sigma.inverse();
    let s = inv.as_matrix();
    let w = |m: &SymMatrix| m.as_matrix() * s;
    let (xs, ys, zs, ts) = (w(x), w(y), w(z), w(t));
    Ok(0.5 * (&xs * &ys * (&zs * &ts - &ts * &zs)).trace())
}

/// `R(X, Y, X, Y) = g(R(X, Y)Y, X)`.
pub fn riemann_xyxy(id: &MetricId, sigma: &SpdMatrix, x: &SymMatrix, y: &SymMatrix) -> Result<f64> {
    sigma.check_dim(x)?;
    sigma.check_dim(y)?;
    match id.kind {
        MetricKind::Euclidean | MetricKind::LogEuclidean => Ok(0.0),
        // the (1, 3) tensor does not depend on β and R(X, Y)T is traceless
        // against Σ⁻¹, so only α scales the (0, 4) tensor
        MetricKind::AffineInvariant => Ok(id.params(sigma.n())?.alpha * ai_riemann(sigma, x, y, x, y)?),
        MetricKind::BuresWasserstein => bw_riemann_diag(sigma, x, y),
        MetricKind::Bkm => bkm_metric(sigma, &bkm_riemann(sigma, x, y, y)?, x),
        MetricKind::PolarAffine => {
            let (xt, yt) = (dsquare(sigma, x), dsquare(sigma, y));
            Ok(id.params(sigma.n())?.alpha * ai_riemann(&square(sigma), &xt, &yt, &xt, &yt)?)
        }
    }
}

/// `R(X, Y, X, Y) / (g(X, X)g(Y, Y) − g(X, Y)²)`.
pub fn sectional_curvature(id: &MetricId, sigma: &SpdMatrix, x: &SymMatrix, y: &SymMatrix) -> Result<f64> {
    let gxx = eval(id, sigma, x, x)?;
    let gyy = eval(id, sigma, y, y)?;
    let gxy = eval(id, sigma, x, y)?;
    let det = gxx * gyy - gxy * gxy;
    if !(det > 1e-14 * gxx * gyy) {
        return Err(Error::DegeneratePlane { det });
    }
    Ok(riemann_xyxy(id, sigma, x, y)? / det)
}

/// Basis `Σ^{1/2} Eᵝᵢⱼ Σ^{1/2}` (`i ≤ j`) with
/// `Eᵝᵢⱼ = Eᵢⱼ + ((1 − p)/(np)) δᵢⱼ I`, `p = √((α + nβ)/α)`, orthogonal with
/// squared norm `α` for the `(α, β)` affine-invariant metric at `Σ`.
pub fn e_beta_basis(sigma: &SpdMatrix, st: &STParams) -> Result<Vec<((usize, usize), SymMatrix)>> {
    let n = sigma.n();
    let st = st.with_n(n)?;
    let p = ((st.alpha + n as f64 * st.beta) / st.alpha).sqrt();
    let shift = (1.0 - p) / (n as f64 * p);
    let half = sigma.sqrt();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            let mut m = DMatrix::zeros(n, n);
            if i == j {
                m[(i, i)] = 1.0;
                m += DMatrix::identity(n, n) * shift;
            } else {
                m[(i, j)] = std::f64::consts::FRAC_1_SQRT_2;
                m[(j, i)] = std::f64::consts::FRAC_1_SQRT_2;
            }
            out.push(((i, j), SymMatrix::new(m).congruence(half.as_matrix())));
        }
    }
    Ok(out)
}
