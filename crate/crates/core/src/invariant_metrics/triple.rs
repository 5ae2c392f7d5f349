use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use super::{arrange_pair, arrange_single, co_eval, eval, EigenForm, InvariantMetric, SamplingGrid};
use crate::error::{Error, Result};
use crate::symlin::{divided_difference, SpdMatrix, SymMatrix, UnivariateFn};

/// Function of the full eigenvalue vector. For `α` and `β` the first two
/// entries are the distinguished pair `(dᵢ, dⱼ)`; for `γ` the first entry is
/// `dᵢ`. The remaining entries follow in index order.
pub type TripleFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// The `(α, β, γ)` description of an O(n)-invariant metric:
/// `αᵢⱼ = α(dᵢ, dⱼ, rest)`, `Sᵢⱼ = β(dᵢ, dⱼ, rest)` for `i ≠ j` and
/// `Sᵢᵢ = γ(dᵢ, rest)`.
#[derive(Clone)]
pub struct MetricTriple {
    pub alpha: TripleFn,
    pub beta: TripleFn,
    pub gamma: TripleFn,
    pub n: usize,
    pub name: String,
}

impl fmt::Debug for MetricTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MetricTriple({}, n = {})", self.name, self.n)
    }
}

impl MetricTriple {
    pub fn new(
        n: usize,
        alpha: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        beta: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        gamma: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            alpha: Arc::new(alpha),
            beta: Arc::new(beta),
            gamma: Arc::new(gamma),
            n,
            name: "triple".into(),
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Frobenius metric `(1, 0, 1)`.
    pub fn frobenius(n: usize) -> Self {
        Self::new(n, |_| 1.0, |_| 0.0, |_| 1.0).named("frobenius")
    }

    /// Triple read off any invariant metric: `α = α₁₂`, `β = S₁₂`, `γ = S₁₁`
    /// of its form at the arranged eigenvalue vector.
    pub fn from_metric(n: usize, m: Arc<dyn InvariantMetric>) -> Self {
        let (ma, mb, mg) = (m.clone(), m.clone(), m.clone());
        let name = m.label();
        Self::new(
            n,
            move |d| ma.eigen_form(d).map(|f| f.alpha[(0, 1)]).unwrap_or(f64::NAN),
            move |d| mb.eigen_form(d).map(|f| f.s[(0, 1)]).unwrap_or(f64::NAN),
            move |d| mg.eigen_form(d).map(|f| f.s[(0, 0)]).unwrap_or(f64::NAN),
        )
        .named(name)
    }

    pub fn alpha_at(&self, d: &[f64]) -> f64 {
        (self.alpha)(d)
    }

    pub fn beta_at(&self, d: &[f64]) -> f64 {
        (self.beta)(d)
    }

    pub fn gamma_at(&self, d: &[f64]) -> f64 {
        (self.gamma)(d)
    }

    /// `S(d)`.
    pub fn s_matrix(&self, d: &[f64]) -> DMatrix<f64> {
        let n = d.len();
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                (self.gamma)(&arrange_single(d, i))
            } else {
                (self.beta)(&arrange_pair(d, i, j))
            }
        })
    }
}

impl InvariantMetric for MetricTriple {
    fn eigen_form(&self, d: &[f64]) -> Result<EigenForm> {
        if d.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: d.len(),
            });
        }
        let n = d.len();
        let alpha = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                0.0
            } else {
                (self.alpha)(&arrange_pair(d, i, j))
            }
        });
        Ok(EigenForm {
            alpha,
            s: self.s_matrix(d),
        })
    }

    fn label(&self) -> String {
        self.name.clone()
    }
}

/// `g_Σ(X, Y)` for a triple.
pub fn metric_eval(t: &MetricTriple, sigma: &SpdMatrix, x: &SymMatrix, y: &SymMatrix) -> Result<f64> {
    eval(t, sigma, x, y)
}

/// Cometric of a triple: weights `1/α` and `S(d)⁻¹` by dense inversion.
pub fn cometric_eval(t: &MetricTriple, sigma: &SpdMatrix, w: &SymMatrix, w2: &SymMatrix) -> Result<f64> {
    co_eval(t, sigma, w, w2)
}

/// Pullback of `t` by the diffeomorphism `f` of `(0, ∞)`. The differential
/// scales `X'ᵢⱼ` by `f^[1](dᵢ,dⱼ)` and `X'ᵢᵢ` by `f'(dᵢ)`, hence
/// `α_f(d) = α(f(d)) f^[1](d₁,d₂)²`, `β_f(d) = β(f(d)) f'(d₁) f'(d₂)` and
/// `γ_f(d) = γ(f(d)) f'(d₁)²`.
pub fn pullback_triple(t: &MetricTriple, f: &UnivariateFn, f_inverse_exists: bool) -> Result<MetricTriple> {
    if !f_inverse_exists {
        return Err(Error::InvalidSpec(format!(
            "pullback by {} requires a diffeomorphism",
            f.name()
        )));
    }
    for x in SamplingGrid::probe_values() {
        let df = f.deriv(x);
        if !(df.abs() > 0.0) || !df.is_finite() {
            return Err(Error::InvalidSpec(format!("derivative of {} vanishes at {x}", f.name())));
        }
    }
    let fmap = |f: &UnivariateFn, d: &[f64]| d.iter().map(|&x| f.eval(x)).collect::<Vec<_>>();
    let (ta, tb, tg) = (t.alpha.clone(), t.beta.clone(), t.gamma.clone());
    let (fa, fb, fg) = (f.clone(), f.clone(), f.clone());
    Ok(MetricTriple::new(
        t.n,
        move |d| {
            let dd = divided_difference(&fa, d[0], d[1]);
            ta(&fmap(&fa, d)) * dd * dd
        },
        move |d| tb(&fmap(&fb, d)) * fb.deriv(d[0]) * fb.deriv(d[1]),
        move |d| {
            let df = fg.deriv(d[0]);
            tg(&fmap(&fg, d)) * df * df
        },
    )
    .named(format!("{}*{}", f.name(), t.name)))
}

/// Largest relative deviation from a functional equation over the samples.
#[derive(Clone, Debug, PartialEq)]
pub struct InvarianceReport {
    pub max_relative_deviation: f64,
    pub worst_sample: Vec<f64>,
}

impl InvarianceReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_relative_deviation <= tol
    }
}

struct Worst {
    dev: f64,
    sample: Vec<f64>,
}

impl Worst {
    fn new() -> Self {
        Self {
            dev: 0.0,
            sample: Vec::new(),
        }
    }

    fn record(&mut self, dev: f64, d: &[f64]) {
        let dev = if dev.is_nan() { f64::INFINITY } else { dev };
        if dev > self.dev || self.sample.is_empty() {
            self.dev = self.dev.max(dev);
            self.sample = d.to_vec();
        }
    }

    fn report(self) -> InvarianceReport {
        InvarianceReport {
            max_relative_deviation: self.dev,
            worst_sample: self.sample,
        }
    }
}

fn rel(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.max(f64::MIN_POSITIVE)
}

/// Checks `f(λd) = λ⁻² f(d)` for `f ∈ {α, β, γ}` at every sample and every
/// `λ` in `lambdas`.
pub fn scaling_invariance_check(t: &MetricTriple, samples: &[Vec<f64>], lambdas: &[f64]) -> InvarianceReport {
    let mut w = Worst::new();
    for d in samples {
        for &l in lambdas {
            let ld: Vec<f64> = d.iter().map(|x| l * x).collect();
            let k = l.powi(-2);
            let g = t.gamma_at(d);
            w.record(rel(t.gamma_at(&ld), k * g, k * g.abs()), d);
            if d.len() >= 2 {
                let (a, b) = (t.alpha_at(d), t.beta_at(d));
                let scale_ab = k * (a.abs() + b.abs());
                w.record(rel(t.alpha_at(&ld), k * a, k * a.abs()), d);
                w.record(rel(t.beta_at(&ld), k * b, scale_ab), d);
            }
        }
    }
    w.report()
}

/// Checks `γ(d⁻¹) = d₁⁴ γ(d)` and `f(d⁻¹) = d₁² d₂² f(d)` for `f ∈ {α, β}`.
pub fn inversion_invariance_check(t: &MetricTriple, samples: &[Vec<f64>]) -> InvarianceReport {
    let mut w = Worst::new();
    for d in samples {
        let inv: Vec<f64> = d.iter().map(|x| 1.0 / x).collect();
        let g = d[0].powi(4) * t.gamma_at(d);
        w.record(rel(t.gamma_at(&inv), g, g.abs()), d);
        if d.len() >= 2 {
            let k = d[0] * d[0] * d[1] * d[1];
            let (a, b) = (k * t.alpha_at(d), k * t.beta_at(d));
            w.record(rel(t.alpha_at(&inv), a, a.abs()), d);
            w.record(rel(t.beta_at(&inv), b, a.abs() + b.abs()), d);
        }
    }
    w.report()
}
