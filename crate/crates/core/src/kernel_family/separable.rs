use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::{BostSpec, KernelFn};
use crate::error::{Error, Result};
use crate::invariant_metrics::{EigenForm, InvariantMetric, SMatrix, SamplingGrid};
use crate::symlin::{SpdMatrix, SymMatrix};

pub type UnaryFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Bivariate separable metric
/// `g_Σ(X, X) = tr(Ψ_Σ(X)²) + tr(Ψ⁽¹⁾_Σ(X)) tr(Ψ⁽²⁾_Σ(X))` with
/// `[Ψ_D(X)]ᵢⱼ = ψ(dᵢ, dⱼ) Xᵢⱼ` and `Ψ⁽ᵏ⁾_D(X) = Diag(ψ⁽ᵏ⁾(dᵢ) Xᵢᵢ)`.
///
/// Its matrix is `S = Δ(I + ½(xyᵀ + yxᵀ))Δ` with `Δ = Diag(ψ(dᵢ, dᵢ))`,
/// `xᵢ = ψ⁽¹⁾(dᵢ)/ψ(dᵢ, dᵢ)` and `yᵢ = ψ⁽²⁾(dᵢ)/ψ(dᵢ, dᵢ)`.
#[derive(Clone)]
pub struct SeparableSpec {
    pub name: String,
    pub psi: KernelFn,
    pub psi1: UnaryFn,
    pub psi2: UnaryFn,
}

impl fmt::Debug for SeparableSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SeparableSpec({})", self.name)
    }
}

/// `x`, `y` and the diagonal of `Δ` at one spectrum.
struct Factors {
    x: DVector<f64>,
    y: DVector<f64>,
    delta: DVector<f64>,
}

impl Factors {
    fn c(&self) -> f64 {
        let xy = self.x.dot(&self.y);
        1.0 + xy - 0.25 * (self.x.norm_squared() * self.y.norm_squared() - xy * xy)
    }
}

impl SeparableSpec {
    pub fn new(
        name: impl Into<String>,
        psi: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        psi1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        psi2: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            psi: Arc::new(psi),
            psi1: Arc::new(psi1),
            psi2: Arc::new(psi2),
        }
    }

    /// The BOST metric `α tr(Ψ²) + β tr(Ψ)²` as a separable metric:
    /// `ψ = √(α/φ)`, `ψ⁽¹⁾(x) = β φ(x, x)^{-1/2}`, `ψ⁽²⁾(x) = φ(x, x)^{-1/2}`.
    pub fn from_bost(b: &BostSpec) -> Self {
        let (k1, k2, k3) = (b.phi.clone(), b.phi.clone(), b.phi.clone());
        let (alpha, beta) = (b.alpha, b.beta);
        Self::new(
            format!("separable({})", b.phi.name()),
            move |x, y| (alpha / k1.phi(x, y)).sqrt(),
            move |x| beta / k2.phi(x, x).sqrt(),
            move |x| 1.0 / k3.phi(x, x).sqrt(),
        )
    }

    fn factors(&self, d: &[f64]) -> Factors {
        let delta = DVector::from_iterator(d.len(), d.iter().map(|&v| (self.psi)(v, v)));
        let x = DVector::from_fn(d.len(), |i, _| (self.psi1)(d[i]) / delta[i]);
        let y = DVector::from_fn(d.len(), |i, _| (self.psi2)(d[i]) / delta[i]);
        Factors { x, y, delta }
    }

    /// Checks `ψ > 0` on the diagonal and `‖x‖‖y‖ − ⟨x, y⟩ < 2` at `d`.
    pub fn check_at(&self, d: &[f64]) -> Result<()> {
        let f = self.factors(d);
        if f.delta.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidSpec(format!("psi not positive on the diagonal at d = {d:?}")));
        }
        let gap = f.x.norm() * f.y.norm() - f.x.dot(&f.y);
        if !(gap < 2.0) || !(f.c() > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "separable positivity fails at d = {d:?}: |x||y| - <x,y> = {gap}"
            )));
        }
        Ok(())
    }

    /// Positivity condition on every point of `grid` in dimension `n`, plus
    /// positivity of `ψ` off the diagonal.
    pub fn validate(&self, grid: &SamplingGrid, n: usize) -> Result<()> {
        for d in grid.points(n) {
            self.check_at(&d)?;
            if n >= 2 {
                let v = (self.psi)(d[0], d[1]);
                if !(v > 0.0) || !v.is_finite() {
                    return Err(Error::InvalidSpec(format!("psi not positive at ({}, {})", d[0], d[1])));
                }
            }
        }
        Ok(())
    }
}

impl InvariantMetric for SeparableSpec {
    fn eigen_form(&self, d: &[f64]) -> Result<EigenForm> {
        let n = d.len();
        let f = self.factors(d);
        let core = DMatrix::identity(n, n) + (&f.x * f.y.transpose() + &f.y * f.x.transpose()) * 0.5;
        let dm = DMatrix::from_diagonal(&f.delta);
        Ok(EigenForm {
            alpha: DMatrix::from_fn(n, n, |i, j| (self.psi)(d[i], d[j]).powi(2)),
            s: &dm * core * &dm,
        })
    }

    fn co_eigen_form(&self, d: &[f64]) -> Result<EigenForm> {
        let n = d.len();
        Ok(EigenForm {
            alpha: DMatrix::from_fn(n, n, |i, j| (self.psi)(d[i], d[j]).powi(-2)),
            s: separable_cometric(self, d)?,
        })
    }

    fn label(&self) -> String {
        self.name.clone()
    }
}

/// `tr(Ψ(X)Ψ(Y)) + ½[tr(Ψ⁽¹⁾(X)) tr(Ψ⁽²⁾(Y)) + tr(Ψ⁽²⁾(X)) tr(Ψ⁽¹⁾(Y))]`.
pub fn separable_eval(s: &SeparableSpec, sigma: &SpdMatrix, x: &SymMatrix, y: &SymMatrix) -> Result<f64> {
    sigma.check_dim(x)?;
    sigma.check_dim(y)?;
    let e = sigma.eig();
    let d = e.d.as_slice();
    let (xp, yp) = (e.to_eigenbasis(x), e.to_eigenbasis(y));
    let n = d.len();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (s.psi)(d[i], d[j]).powi(2) * xp[(i, j)] * yp[(i, j)];
        }
    }
    let tr = |k: &UnaryFn, m: &DMatrix<f64>| (0..n).map(|i| k(d[i]) * m[(i, i)]).sum::<f64>();
    acc += 0.5 * (tr(&s.psi1, &xp) * tr(&s.psi2, &yp) + tr(&s.psi2, &xp) * tr(&s.psi1, &yp));
    Ok(acc)
}

/// Closed-form inverse of `S(d)`:
/// `Δ⁻¹[I − (2 + ⟨x,y⟩)(xyᵀ + yxᵀ)/(4c) + (‖y‖²xxᵀ + ‖x‖²yyᵀ)/(4c)]Δ⁻¹`
/// with `c = 1 + ⟨x,y⟩ − ¼(‖x‖²‖y‖² − ⟨x,y⟩²)`.
pub fn separable_cometric(s: &SeparableSpec, d: &[f64]) -> Result<SMatrix> {
    s.check_at(d)?;
    let n = d.len();
    let f = s.factors(d);
    let (x, y) = (&f.x, &f.y);
    let xy = x.dot(y);
    let c4 = 4.0 * f.c();
    let m = x * y.transpose() + y * x.transpose();
    let nn = x * x.transpose() * y.norm_squared() + y * y.transpose() * x.norm_squared();
    let core = DMatrix::identity(n, n) - m * ((2.0 + xy) / c4) + nn / c4;
    let inv = f.delta.map(|v| 1.0 / v);
    Ok(DMatrix::from_fn(n, n, |i, j| inv[i] * core[(i, j)] * inv[j]))
}

/// The cometric at spectrum `d` as a separable spec: `ψ* = 1/ψ` and
/// `ψ*⁽ᵏ⁾(dᵢ) = x'ᵢ/ψ(dᵢ, dᵢ)`, `y'ᵢ/ψ(dᵢ, dᵢ)` from the factorization
/// `x' = ‖y‖(x − λy)/(4c)`, `y' = ‖y‖(x − μy)` where `λ`, `μ` are the roots
/// of `‖y‖²t² − 2(2 + ⟨x,y⟩)t + ‖x‖²`.
///
/// `x'` and `y'` depend on the whole spectrum, so `ψ*⁽¹⁾` and `ψ*⁽²⁾` are
/// only defined at the entries of `d` (they are read at the nearest entry);
/// the result must be evaluated at matrices with spectrum `d`. They may take
/// negative values.
pub fn separable_dual(s: &SeparableSpec, d: &[f64]) -> Result<SeparableSpec> {
    s.check_at(d)?;
    let f = s.factors(d);
    let (x, y) = (&f.x, &f.y);
    let ny = y.norm();
    let (xp, yp) = if ny == 0.0 {
        (DVector::zeros(d.len()), DVector::zeros(d.len()))
    } else {
        let xy = x.dot(y);
        let c = f.c();
        let delta = ((2.0 + xy) + x.norm() * ny) * ((2.0 + xy) - x.norm() * ny);
        let sq = delta.max(0.0).sqrt();
        let lambda = (2.0 + xy + sq) / (ny * ny);
        let mu = (2.0 + xy - sq) / (ny * ny);
        ((x - y * lambda) * (ny / (4.0 * c)), (x - y * mu) * ny)
    };
    let spectrum: Vec<f64> = d.to_vec();
    let p1: Vec<f64> = (0..d.len()).map(|i| xp[i] / f.delta[i]).collect();
    let p2: Vec<f64> = (0..d.len()).map(|i| yp[i] / f.delta[i]).collect();
    let nearest = move |v: f64, spectrum: &[f64]| {
        let mut best = 0;
        for (k, &sk) in spectrum.iter().enumerate() {
            if (sk - v).abs() < (spectrum[best] - v).abs() {
                best = k;
            }
        }
        best
    };
    let (s1, s2) = (spectrum.clone(), spectrum);
    let psi = s.psi.clone();
    Ok(SeparableSpec::new(
        format!("dual({})", s.name),
        move |a, b| 1.0 / psi(a, b),
        move |v| p1[nearest(v, &s1)],
        move |v| p2[nearest(v, &s2)],
    ))
}
