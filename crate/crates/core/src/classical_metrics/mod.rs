//! Closed-form geometry of the classical O(n)-invariant metrics: Euclidean,
//! log-Euclidean and affine-invariant (each with an `(α, β)` pair),
//! Bures-Wasserstein, Bogoliubov-Kubo-Mori and polar-affine.
//!
//! Every family has eigen-form `αᵢⱼ = a·wᵢⱼ(d)`, `S = V(aI + b𝟙𝟙ᵀ)V` with
//! `V = Diag(vᵢ(d))`, which also gives the cometric in closed form.

mod bkm;
mod bw;
mod connection;

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::inner_products::STParams;
use crate::invariant_metrics::{polar_orthogonal, EigenForm, InvariantMetric};
use crate::symlin::{
    sqrt_product, sylvester_lift, univariate_diff, univariate_diff_inv, SpdMatrix, SymMatrix,
    UnivariateFn,
};

pub use bkm::{bkm_connection, bkm_dg, bkm_g, bkm_m2, bkm_m3, bkm_metric, bkm_riemann};
pub use bw::{bw_quotient_check, bw_riemann_diag, QuotientReport};
pub use connection::{ai_riemann, connection, e_beta_basis, riemann_xyxy, sectional_curvature};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MetricKind {
    Euclidean,
    LogEuclidean,
    AffineInvariant,
    BuresWasserstein,
    Bkm,
    PolarAffine,
}

/// A classical metric with its parameters. `st` is required for the
/// Euclidean, log-Euclidean and affine-invariant families, optional for
/// polar-affine (default `(1, 0)`) and absent for Bures-Wasserstein and BKM.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricId {
    pub kind: MetricKind,
    pub st: Option<STParams>,
}

impl MetricId {
    pub fn new(kind: MetricKind, st: Option<STParams>) -> Result<Self> {
        use MetricKind::*;
        match (kind, st) {
            (Euclidean | LogEuclidean | AffineInvariant, None) => {
                Err(Error::InvalidSpec(format!("{kind:?} needs (alpha, beta)")))
            }
            (BuresWasserstein | Bkm, Some(_)) => {
                Err(Error::InvalidSpec(format!("{kind:?} has no trace-term extension")))
            }
            _ => {
                if let Some(p) = st {
                    p.validate()?;
                }
                Ok(Self { kind, st })
            }
        }
    }

    fn st1(alpha: f64, beta: f64) -> Result<Option<STParams>> {
        Ok(Some(STParams::new(alpha, beta, 1)?))
    }

    pub fn euclidean(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(MetricKind::Euclidean, Self::st1(alpha, beta)?)
    }

    pub fn log_euclidean(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(MetricKind::LogEuclidean, Self::st1(alpha, beta)?)
    }

    pub fn affine_invariant(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(MetricKind::AffineInvariant, Self::st1(alpha, beta)?)
    }

    pub fn polar_affine(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(MetricKind::PolarAffine, Self::st1(alpha, beta)?)
    }

    pub fn bures_wasserstein() -> Self {
        Self {
            kind: MetricKind::BuresWasserstein,
            st: None,
        }
    }

    pub fn bkm() -> Self {
        Self {
            kind: MetricKind::Bkm,
            st: None,
        }
    }

    /// `(α, β)` in dimension `n`; `(1, 0)` for the families without them.
    pub fn params(&self, n: usize) -> Result<STParams> {
        match self.st {
            Some(p) => p.with_n(n),
            None => Ok(STParams::frobenius(n)),
        }
    }

    /// Offdiagonal weights `w`, diagonal scale `v` and `(a, b)` at `d`.
    fn structure(&self, d: &[f64]) -> Result<(DMatrix<f64>, DVector<f64>, STParams)> {
        let n = d.len();
        let p = self.params(n)?;
        let m2 = |x: f64, y: f64| bkm_m2(x, y);
        let (w, v) = match self.kind {
            MetricKind::Euclidean => (DMatrix::from_element(n, n, 1.0), DVector::from_element(n, 1.0)),
            MetricKind::LogEuclidean => (
                DMatrix::from_fn(n, n, |i, j| m2(d[i], d[j]).powi(2)),
                DVector::from_fn(n, |i, _| 1.0 / d[i]),
            ),
            MetricKind::AffineInvariant => (
                DMatrix::from_fn(n, n, |i, j| 1.0 / (d[i] * d[j])),
                DVector::from_fn(n, |i, _| 1.0 / d[i]),
            ),
            MetricKind::BuresWasserstein => (
                DMatrix::from_fn(n, n, |i, j| 0.5 / (d[i] + d[j])),
                DVector::from_fn(n, |i, _| 0.5 / d[i].sqrt()),
            ),
            MetricKind::Bkm => (
                DMatrix::from_fn(n, n, |i, j| m2(d[i], d[j])),
                DVector::from_fn(n, |i, _| 1.0 / d[i].sqrt()),
            ),
            MetricKind::PolarAffine => (
                DMatrix::from_fn(n, n, |i, j| ((d[i] + d[j]) / (d[i] * d[j])).powi(2)),
                DVector::from_fn(n, |i, _| 2.0 / d[i]),
            ),
        };
        Ok((w, v, p))
    }
}

fn st_form(w: &DMatrix<f64>, v: &DVector<f64>, p: &STParams) -> EigenForm {
    let n = v.len();
    EigenForm {
        alpha: w * p.alpha,
        s: DMatrix::from_fn(n, n, |i, j| v[i] * v[j] * (p.beta + if i == j { p.alpha } else { 0.0 })),
    }
}

impl InvariantMetric for MetricId {
    fn eigen_form(&self, d: &[f64]) -> Result<EigenForm> {
        let (w, v, p) = self.structure(d)?;
        Ok(st_form(&w, &v, &p))
    }

    fn co_eigen_form(&self, d: &[f64]) -> Result<EigenForm> {
        let (w, v, p) = self.structure(d)?;
        Ok(st_form(&w.map(|x| 1.0 / x), &v.map(|x| 1.0 / x), &p.dual()))
    }

    fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            MetricKind::Euclidean => "e",
            MetricKind::LogEuclidean => "le",
            MetricKind::AffineInvariant => "ai",
            MetricKind::BuresWasserstein => "bw",
            MetricKind::Bkm => "bkm",
            MetricKind::PolarAffine => "pa",
        };
        match self.st {
            Some(p) => write!(f, "{name}:alpha={},beta={}", p.alpha, p.beta),
            None => write!(f, "{name}"),
        }
    }
}

/// Parses `kind[:alpha=a,beta=b]` with kind one of `e`, `le`, `ai`, `bw`,
/// `bkm`, `pa`. Missing parameters default to `alpha = 1`, `beta = 0`.
impl FromStr for MetricId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h.trim(), Some(r)),
            None => (s.trim(), None),
        };
        let kind = match head.to_ascii_lowercase().as_str() {
            "e" | "euclidean" => MetricKind::Euclidean,
            "le" | "log_euclidean" => MetricKind::LogEuclidean,
            "ai" | "affine_invariant" => MetricKind::AffineInvariant,
            "bw" | "bures_wasserstein" => MetricKind::BuresWasserstein,
            "bkm" => MetricKind::Bkm,
            "pa" | "polar_affine" => MetricKind::PolarAffine,
            _ => return Err(Error::InvalidSpec(format!("unknown metric '{head}'"))),
        };
        let (mut alpha, mut beta) = (1.0, 0.0);
        let mut given = false;
        for kv in rest.into_iter().flat_map(|r| r.split(',')).filter(|t| !t.trim().is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::InvalidSpec(format!("expected key=value, got '{kv}'")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidSpec(format!("bad number '{}'", v.trim())))?;
            match k.trim() {
                "alpha" => alpha = v,
                "beta" => beta = v,
                other => return Err(Error::InvalidSpec(format!("unknown parameter '{other}'"))),
            }
            given = true;
        }
        let st = match kind {
            MetricKind::BuresWasserstein | MetricKind::Bkm => {
                if given {
                    return Err(Error::InvalidSpec(format!("{head} takes no parameters")));
                }
                None
            }
            _ => MetricId::st1(alpha, beta)?,
        };
        MetricId::new(kind, st)
    }
}

/// Open interval `(t_lo, t_hi)` containing 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeodesicDomain {
    pub t_lo: f64,
    pub t_hi: f64,
}

impl GeodesicDomain {
    pub const FULL: GeodesicDomain = GeodesicDomain {
        t_lo: f64::NEG_INFINITY,
        t_hi: f64::INFINITY,
    };

    /// Interval on which `1 + tλ > 0` for every `λ` in `eigs`.
    pub fn from_eigenvalues(eigs: &[f64]) -> Self {
        let max = eigs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
        GeodesicDomain {
            t_lo: if max > 0.0 { -1.0 / max } else { f64::NEG_INFINITY },
            t_hi: if min < 0.0 { -1.0 / min } else { f64::INFINITY },
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        self.t_lo < t && t < self.t_hi
    }

    fn check(&self, t: f64) -> Result<()> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(Error::OutsideGeodesicDomain {
                t,
                lo: self.t_lo,
                hi: self.t_hi,
            })
        }
    }
}

fn unsupported(id: &MetricId, what: &str) -> Error {
    Error::Unsupported(format!("{what} is not known in closed form for {id}"))
}

fn same_n(sigma: &SpdMatrix, lambda: &SpdMatrix) -> Result<()> {
    if sigma.n() != lambda.n() {
        return Err(Error::DimensionMismatch {
            expected: sigma.n(),
            got: lambda.n(),
        });
    }
    Ok(())
}

fn st_norm(p: &STParams, x: &SymMatrix) -> f64 {
    (p.alpha * x.dot(x) + p.beta * x.trace().powi(2)).max(0.0).sqrt()
}

/// `Σ²` for the polar-affine reductions.
fn square(sigma: &SpdMatrix) -> SpdMatrix {
    sigma.powf(2.0)
}

/// `ΣX + XΣ`, the differential of `Σ ↦ Σ²`.
fn dsquare(sigma: &SpdMatrix, x: &SymMatrix) -> SymMatrix {
    sigma.as_sym().anticommutator(x)
}

fn ai_of(id: &MetricId) -> MetricId {
    MetricId {
        kind: MetricKind::AffineInvariant,
        st: Some(id.st.unwrap_or(STParams::frobenius(1))),
    }
}

/// `Σ^{-1/2} Λ Σ^{-1/2}`.
fn whitened(sigma: &SpdMatrix, lambda: &SpdMatrix) -> Result<SpdMatrix> {
    SpdMatrix::new(lambda.as_sym().congruence(sigma.inv_sqrt().as_matrix()))
}

pub fn dist(id: &MetricId, sigma: &SpdMatrix, lambda: &SpdMatrix) -> Result<f64> {
    same_n(sigma, lambda)?;
    let n = sigma.n();
    match id.kind {
        MetricKind::Euclidean => Ok(st_norm(&id.params(n)?, &(lambda.as_sym() - sigma.as_sym()))),
        MetricKind::LogEuclidean => Ok(st_norm(&id.params(n)?, &(lambda.log() - sigma.log()))),
        MetricKind::AffineInvariant => Ok(st_norm(&id.params(n)?, &whitened(sigma, lambda)?.log())),
        MetricKind::BuresWasserstein => {
            // Procrustes residual ‖Σ^{1/2} − Λ^{1/2}U‖ with U the polar factor
            // of Λ^{1/2}Σ^{1/2}; avoids the cancellation in tr Σ + tr Λ − 2 tr(…)
            let (a, b) = (sigma.sqrt(), lambda.sqrt());
            let u = polar_orthogonal(&(b.as_matrix() * a.as_matrix()));
            Ok((a.as_matrix() - b.as_matrix() * u).norm())
        }
        MetricKind::PolarAffine => dist(&ai_of(id), &square(sigma), &square(lambda)),
        MetricKind::Bkm => Err(unsupported(id, "the distance")),
    }
}

pub fn geodesic_domain(id: &MetricId, sigma: &SpdMatrix, x: &SymMatrix) -> Result<GeodesicDomain> {
    sigma.check_dim(x)?;
    match id.kind {
        MetricKind::Euclidean => {
            let w = x.congruence(sigma.inv_sqrt().as_matrix()).eigh()?;
            Ok(GeodesicDomain::from_eigenvalues(w.d.as_slice()))
        }
        MetricKind::BuresWasserstein => {
            let x0 = sylvester_lift(sigma, x).eigh()?;
            Ok(GeodesicDomain::from_eigenvalues(x0.d.as_slice()))
        }
        MetricKind::LogEuclidean | MetricKind::AffineInvariant | MetricKind::PolarAffine => Ok(GeodesicDomain::FULL),
        MetricKind::Bkm => Err(unsupported(id, "the exponential map")),
    }
}

/// Point at time `t` of the geodesic from `Σ` with initial velocity `X`.
pub fn exp_map(id: &MetricId, sigma: &SpdMatrix, x: &SymMatrix, t: f64) -> Result<SpdMatrix> {
    geodesic_domain(id, sigma, x)?.check(t)?;
    let log = UnivariateFn::log();
    match id.kind {
        MetricKind::Euclidean => SpdMatrix::new(sigma.as_sym() + &x.scale(t)),
        MetricKind::LogEuclidean => {
            let v = univariate_diff(&log, sigma, x)?;
            SpdMatrix::exp_sym(&(sigma.log() + v.scale(t)))
        }
        MetricKind::AffineInvariant => {
            let w = x.congruence(sigma.inv_sqrt().as_matrix());
            let e = SpdMatrix::exp_sym(&w.scale(t))?;
            SpdMatrix::new(e.as_sym().congruence(sigma.sqrt().as_matrix()))
        }
        MetricKind::BuresWasserstein => {
            let x0 = sylvester_lift(sigma, x);
            let n = sigma.n();
            let a = DMatrix::identity(n, n) + x0.as_matrix() * t;
            SpdMatrix::new(sigma.as_sym().congruence(&a))
        }
        MetricKind::PolarAffine => {
            let s2 = exp_map(&ai_of(id), &square(sigma), &dsquare(sigma, x), t)?;
            Ok(s2.sqrt())
        }
        MetricKind::Bkm => Err(unsupported(id, "the exponential map")),
    }
}

/// Initial velocity of the geodesic from `Σ` reaching `Λ` at time 1.
pub fn log_map(id: &MetricId, sigma: &SpdMatrix, lambda: &SpdMatrix) -> Result<SymMatrix> {
    same_n(sigma, lambda)?;
    let log = UnivariateFn::log();
    match id.kind {
        MetricKind::Euclidean => Ok(lambda.as_sym() - sigma.as_sym()),
        MetricKind::LogEuclidean => univariate_diff_inv(&log, sigma, &(lambda.log() - sigma.log())),
        MetricKind::AffineInvariant => {
            let l = whitened(sigma, lambda)?.log();
            Ok(l.congruence(sigma.sqrt().as_matrix()))
        }
        MetricKind::BuresWasserstein => {
            let sl = sqrt_product(sigma, lambda)?;
            let two = SymMatrix::new(&sl + sl.transpose());
            Ok(two - sigma.as_sym().scale(2.0))
        }
        MetricKind::PolarAffine => {
            let v = log_map(&ai_of(id), &square(sigma), &square(lambda))?;
            Ok(sylvester_lift(sigma, &v))
        }
        MetricKind::Bkm => Err(unsupported(id, "the logarithm map")),
    }
}

/// Velocity at time `t` of the geodesic `exp_map(id, Σ, X, ·)`.
pub fn geodesic_velocity(id: &MetricId, sigma: &SpdMatrix, x: &SymMatrix, t: f64) -> Result<SymMatrix> {
    geodesic_domain(id, sigma, x)?.check(t)?;
    let log = UnivariateFn::log();
    match id.kind {
        MetricKind::Euclidean => Ok(x.clone()),
        MetricKind::LogEuclidean => {
            let g = exp_map(id, sigma, x, t)?;
            univariate_diff_inv(&log, &g, &univariate_diff(&log, sigma, x)?)
        }
        MetricKind::AffineInvariant => {
            let w = x.congruence(sigma.inv_sqrt().as_matrix());
            let e = SpdMatrix::exp_sym(&w.scale(t))?;
            let m = w.as_matrix() * e.as_matrix();
            Ok(SymMatrix::new(m).congruence(sigma.sqrt().as_matrix()))
        }
        MetricKind::BuresWasserstein => {
            let x0 = sylvester_lift(sigma, x);
            let q = x0.as_matrix() * sigma.as_matrix() * x0.as_matrix();
            Ok(x + &SymMatrix::new(q).scale(2.0 * t))
        }
        MetricKind::PolarAffine => {
            let g = exp_map(id, sigma, x, t)?;
            let v = geodesic_velocity(&ai_of(id), &square(sigma), &dsquare(sigma, x), t)?;
            Ok(sylvester_lift(&g, &v))
        }
        MetricKind::Bkm => Err(unsupported(id, "the exponential map")),
    }
}

/// Relative commutator test used by the Bures-Wasserstein closed transport.
pub fn commutator_norm(sigma: &SpdMatrix, lambda: &SpdMatrix) -> f64 {
    let a = sigma.as_matrix() * lambda.as_matrix();
    (&a - a.transpose()).norm()
}

/// Parallel transport of `X` from `Σ` to `Λ` along the geodesic.
pub fn parallel_transport(id: &MetricId, sigma: &SpdMatrix, lambda: &SpdMatrix, x: &SymMatrix) -> Result<SymMatrix> {
    same_n(sigma, lambda)?;
    sigma.check_dim(x)?;
    let log = UnivariateFn::log();
    match id.kind {
        MetricKind::Euclidean => Ok(x.clone()),
        MetricKind::LogEuclidean => univariate_diff_inv(&log, lambda, &univariate_diff(&log, sigma, x)?),
        MetricKind::AffineInvariant => {
            // (ΛΣ⁻¹)^{1/2} = Σ^{1/2}(Σ^{-1/2}ΛΣ^{-1/2})^{1/2}Σ^{-1/2}
            let mid = whitened(sigma, lambda)?.sqrt();
            let e = sigma.sqrt().as_matrix() * mid.as_matrix() * sigma.inv_sqrt().as_matrix();
            Ok(x.congruence(&e))
        }
        MetricKind::BuresWasserstein => {
            let c = commutator_norm(sigma, lambda);
            if c > 1e-10 * sigma.as_matrix().norm() * lambda.as_matrix().norm() {
                return Err(Error::NonCommuting { norm: c });
            }
            // common eigenbasis from Σ; Λ is diagonal there up to the tolerance
            let e = sigma.eig();
            let lp = e.to_eigenbasis(lambda.as_sym());
            let (d, delta) = (&e.d, lp.diagonal());
            Ok(e.hadamard(x, |i, j| ((delta[i] + delta[j]) / (d[i] + d[j])).sqrt()))
        }
        MetricKind::PolarAffine => {
            let v = parallel_transport(&ai_of(id), &square(sigma), &square(lambda), &dsquare(sigma, x))?;
            Ok(sylvester_lift(lambda, &v))
        }
        MetricKind::Bkm => Err(unsupported(id, "parallel transport")),
    }
}
