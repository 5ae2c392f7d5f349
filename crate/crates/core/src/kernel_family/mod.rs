//! Kernel metrics and their extensions.
//!
//! A kernel metric weighs the eigenbasis components of a tangent vector by a
//! symmetric positive function: `g_D(X, X) = Σᵢⱼ X'ᵢⱼ² / φ(dᵢ, dⱼ)`. Mean
//! kernels take `φ = a·m^θ` for a homogeneous mean `m`. The trace-extended
//! (BOST) metrics add `β tr(Ψ(X))²`, and bivariate separable metrics replace
//! that term by `tr(Ψ⁽¹⁾(X)) tr(Ψ⁽²⁾(X))`.

mod bost;
mod mean;
mod separable;

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::invariant_metrics::{EigenForm, InvariantMetric, MetricTriple, SamplingGrid};
use crate::sampling::{log_uniform, rng};
use crate::symlin::{divided_difference, SpdMatrix, SymMatrix, UnivariateFn};

pub use bost::{bod_cometric, bost_cometric, bost_eval, BostSpec};
pub use mean::{
    builtin_mean_kernel, check_mean_axioms, completeness_power, radial_length, CompletenessVerdict,
    Mean, MeanAxiomReport, MeanKernelSpec,
};
pub use separable::{separable_cometric, separable_dual, separable_eval, SeparableSpec, UnaryFn};

pub type KernelFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Names accepted by [`builtin_kernel`].
pub const BUILTIN_KERNELS: [&str; 6] = [
    "euclidean",
    "log_euclidean",
    "affine_invariant",
    "polar_affine",
    "bures_wasserstein",
    "bkm",
];

/// Symmetric positive function `φ` on `(0, ∞)²`.
#[derive(Clone)]
pub struct KernelSpec {
    name: String,
    phi: KernelFn,
}

impl fmt::Debug for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KernelSpec({})", self.name)
    }
}

impl KernelSpec {
    pub fn new(name: impl Into<String>, phi: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            phi: Arc::new(phi),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn phi(&self, x: f64, y: f64) -> f64 {
        (self.phi)(x, y)
    }

    /// `a·φ`.
    pub fn scaled(&self, a: f64) -> KernelSpec {
        let phi = self.phi.clone();
        KernelSpec::new(format!("{}*{a}", self.name), move |x, y| a * phi(x, y))
    }

    /// Samples symmetry and positivity of `φ` on the grid values and random
    /// pairs of `grid`.
    pub fn validate(&self, grid: &SamplingGrid) -> Result<()> {
        let mut pairs: Vec<(f64, f64)> = Vec::new();
        for &x in &grid.tensor_values {
            for &y in &grid.tensor_values {
                pairs.push((x, y));
            }
        }
        let mut r = rng(grid.seed);
        for _ in 0..grid.random_points {
            pairs.push((log_uniform(&mut r, grid.lo, grid.hi), log_uniform(&mut r, grid.lo, grid.hi)));
        }
        for (x, y) in pairs {
            let (a, b) = (self.phi(x, y), self.phi(y, x));
            if !(a > 0.0) || !a.is_finite() {
                return Err(Error::InvalidSpec(format!("kernel {} not positive at ({x}, {y}): {a}", self.name)));
            }
            if (a - b).abs() > 1e-12 * a.abs() {
                return Err(Error::InvalidSpec(format!("kernel {} not symmetric at ({x}, {y})", self.name)));
            }
        }
        Ok(())
    }

    /// Triple `(1/φ(d₁,d₂), 0, 1/φ(d₁,d₁))`.
    pub fn to_triple(&self, n: usize) -> MetricTriple {
        let (pa, pg) = (self.phi.clone(), self.phi.clone());
        MetricTriple::new(n, move |d| 1.0 / pa(d[0], d[1]), |_| 0.0, move |d| 1.0 / pg(d[0], d[0]))
            .named(self.name.clone())
    }
}

impl InvariantMetric for KernelSpec {
    fn eigen_form(&self, d: &[f64]) -> Result<EigenForm> {
        let n = d.len();
        let w = DMatrix::from_fn(n, n, |i, j| 1.0 / self.phi(d[i], d[j]));
        Ok(EigenForm {
            s: DMatrix::from_diagonal(&w.diagonal()),
            alpha: w,
        })
    }

    fn co_eigen_form(&self, d: &[f64]) -> Result<EigenForm> {
        let n = d.len();
        let w = DMatrix::from_fn(n, n, |i, j| self.phi(d[i], d[j]));
        Ok(EigenForm {
            s: DMatrix::from_diagonal(&w.diagonal()),
            alpha: w,
        })
    }

    fn label(&self) -> String {
        self.name.clone()
    }
}

/// Logarithmic mean `(x − y)/(log x − log y)`, equal to `x` on the diagonal.
pub fn log_mean(x: f64, y: f64) -> f64 {
    1.0 / divided_difference(log_fn(), x, y)
}

pub(crate) fn log_fn() -> &'static UnivariateFn {
    use std::sync::OnceLock;
    static LOG: OnceLock<UnivariateFn> = OnceLock::new();
    LOG.get_or_init(UnivariateFn::log)
}

/// The kernels of the classical metrics:
///
/// | name | `φ(x, y)` |
/// |---|---|
/// | `euclidean` | `1` |
/// | `log_euclidean` | `((x − y)/(log x − log y))²` |
/// | `affine_invariant` | `xy` |
/// | `polar_affine` | `(2xy/(x + y))²` |
/// | `bures_wasserstein` | `4·(x + y)/2` |
/// | `bkm` | `(x − y)/(log x − log y)` |
pub fn builtin_kernel(name: &str) -> Result<KernelSpec> {
    let k = match name {
        "euclidean" | "e" => KernelSpec::new("euclidean", |_, _| 1.0),
        "log_euclidean" | "le" => KernelSpec::new("log_euclidean", |x, y| log_mean(x, y).powi(2)),
        "affine_invariant" | "ai" => KernelSpec::new("affine_invariant", |x, y| x * y),
        "polar_affine" | "pa" => KernelSpec::new("polar_affine", |x, y| (2.0 * x * y / (x + y)).powi(2)),
        "bures_wasserstein" | "bw" => KernelSpec::new("bures_wasserstein", |x, y| 4.0 * (x + y) / 2.0),
        "bkm" => KernelSpec::new("bkm", log_mean),
        _ => {
            return Err(Error::InvalidSpec(format!(
                "unknown kernel '{name}' (expected one of {})",
                BUILTIN_KERNELS.join(", ")
            )))
        }
    };
    Ok(k)
}

/// `Σᵢⱼ X'ᵢⱼ Y'ᵢⱼ / φ(dᵢ, dⱼ)`.
pub fn bod_eval(k: &KernelSpec, sigma: &SpdMatrix, x: &SymMatrix, y: &SymMatrix) -> Result<f64> {
    sigma.check_dim(x)?;
    sigma.check_dim(y)?;
    let e = sigma.eig();
    let d = &e.d;
    let (xp, yp) = (e.to_eigenbasis(x), e.to_eigenbasis(y));
    let n = d.len();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += xp[(i, j)] * yp[(i, j)] / k.phi(d[i], d[j]);
        }
    }
    Ok(acc)
}

/// `Ψ_Σ(X)`: eigenbasis components scaled by `φ(dᵢ, dⱼ)^{-1/2}`, so that
/// `tr(Ψ_Σ(X)²)` is the kernel metric.
pub fn psi_apply(k: &KernelSpec, sigma: &SpdMatrix, x: &SymMatrix) -> Result<SymMatrix> {
    sigma.check_dim(x)?;
    let e = sigma.eig();
    let d = &e.d;
    Ok(e.hadamard(x, |i, j| k.phi(d[i], d[j]).powf(-0.5)))
}

/// Rejects functions that are not strictly monotone on the probe points.
fn check_diffeomorphism(f: &UnivariateFn) -> Result<()> {
    let probes = SamplingGrid::probe_values();
    let signs: Vec<f64> = probes.iter().map(|&x| f.deriv(x)).collect();
    let s0 = signs[0].signum();
    let monotone_values = probes.windows(2).all(|w| ((f.eval(w[1]) - f.eval(w[0])) * s0) > 0.0);
    if signs.iter().any(|&s| !(s * s0 > 0.0) || !s.is_finite()) || !monotone_values {
        return Err(Error::InvalidSpec(format!("{} is not a diffeomorphism of (0, inf)", f.name())));
    }
    Ok(())
}

/// Kernel of the pullback metric: `φ_f(x, y) = φ(f(x), f(y)) / f^[1](x, y)²`.
pub fn pullback_kernel(k: &KernelSpec, f: &UnivariateFn) -> Result<KernelSpec> {
    check_diffeomorphism(f)?;
    let (phi, f) = (k.phi.clone(), f.clone());
    let name = format!("{}*{}", f.name(), k.name);
    Ok(KernelSpec::new(name, move |x, y| {
        let dd = divided_difference(&f, x, y);
        phi(f.eval(x), f.eval(y)) / (dd * dd)
    }))
}

/// Kernel of `(1 − t)·g₁ + t·g₂`: `φ₁φ₂ / ((1 − t)φ₂ + tφ₁)`.
pub fn convex_combine(k1: &KernelSpec, k2: &KernelSpec, t: f64) -> Result<KernelSpec> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidSpec(format!("convex weight {t} outside [0, 1]")));
    }
    let (p1, p2) = (k1.phi.clone(), k2.phi.clone());
    let name = format!("({}|{}|{t})", k1.name, k2.name);
    Ok(KernelSpec::new(name, move |x, y| {
        let (a, b) = (p1(x, y), p2(x, y));
        a * b / ((1.0 - t) * b + t * a)
    }))
}
