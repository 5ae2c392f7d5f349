use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Relative spacing below which the divided difference falls back to the
/// derivative at the midpoint.
pub const EPS_DD: f64 = 1e-7;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type PairFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A scalar function with its derivative, extended to symmetric matrices
/// through the spectral decomposition.
///
/// Built-in functions also carry a cancellation-free form of the divided
/// difference `(f(x) - f(y))/(x - y)`, used instead of the naive quotient.
#[derive(Clone)]
pub struct UnivariateFn {
    name: String,
    f: ScalarFn,
    df: ScalarFn,
    dd: Option<PairFn>,
    positive_domain: bool,
}

impl fmt::Debug for UnivariateFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UnivariateFn({})", self.name)
    }
}

impl UnivariateFn {
    /// Function on `(0, ∞)` with analytic derivative `df`.
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
            df: Arc::new(df),
            dd: None,
            positive_domain: true,
        }
    }

    /// Registers a numerically stable divided difference for `x != y`.
    /// It must be symmetric; it is called with `x < y`.
    pub fn with_divided_difference(
        mut self,
        dd: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.dd = Some(Arc::new(dd));
        self
    }

    /// Marks the function as defined on the whole real line.
    pub fn on_real_line(mut self) -> Self {
        self.positive_domain = false;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn deriv(&self, x: f64) -> f64 {
        (self.df)(x)
    }

    pub fn is_positive_domain(&self) -> bool {
        self.positive_domain
    }

    pub(crate) fn check_domain(&self, xs: &[f64]) -> Result<()> {
        for &x in xs {
            if !x.is_finite() || (self.positive_domain && x <= 0.0) {
                return Err(Error::OutsideDomain {
                    function: self.name.clone(),
                    value: x,
                });
            }
        }
        Ok(())
    }

    /// Composition `self ∘ inner`.
    pub fn compose(&self, inner: &UnivariateFn) -> UnivariateFn {
        let (outer, inner) = (self.clone(), inner.clone());
        let (o1, i1) = (outer.clone(), inner.clone());
        let (o2, i2) = (outer.clone(), inner.clone());
        UnivariateFn {
            name: format!("{}∘{}", outer.name, inner.name),
            f: Arc::new(move |x| o1.eval(i1.eval(x))),
            df: Arc::new(move |x| o2.deriv(i2.eval(x)) * i2.deriv(x)),
            positive_domain: inner.positive_domain,
            dd: Some(Arc::new(move |x, y| {
                let (gx, gy) = (inner.eval(x), inner.eval(y));
                divided_difference(&outer, gx, gy) * divided_difference(&inner, x, y)
            })),
        }
    }

    pub fn identity() -> Self {
        Self::new("id", |x| x, |_| 1.0)
            .with_divided_difference(|_, _| 1.0)
            .on_real_line()
    }

    pub fn log() -> Self {
        Self::new("log", f64::ln, |x| 1.0 / x).with_divided_difference(|x, y| {
            // log(y/x)/(y-x) without cancellation in the numerator
            ((y - x) / x).ln_1p() / (y - x)
        })
    }

    pub fn exp() -> Self {
        Self::new("exp", f64::exp, f64::exp)
            .with_divided_difference(|x, y| x.exp() * (y - x).exp_m1() / (y - x))
            .on_real_line()
    }

    /// `x ↦ eˣ - 1`, a diffeomorphism of `(0, ∞)`.
    pub fn exp_shifted() -> Self {
        Self::new("exp-shifted", f64::exp_m1, f64::exp)
            .with_divided_difference(|x, y| x.exp() * (y - x).exp_m1() / (y - x))
    }

    pub fn sqrt() -> Self {
        Self::new("sqrt", f64::sqrt, |x| 0.5 / x.sqrt())
            .with_divided_difference(|x, y| 1.0 / (x.sqrt() + y.sqrt()))
    }

    /// `x ↦ xᵖ`.
    pub fn pow(p: f64) -> Self {
        if p == 2.0 {
            return Self::new("pow2", |x| x * x, |x| 2.0 * x)
                .with_divided_difference(|x, y| x + y);
        }
        if p == -1.0 {
            return Self::new("pow-1", |x| 1.0 / x, |x| -1.0 / (x * x))
                .with_divided_difference(|x, y| -1.0 / (x * y));
        }
        Self::new(format!("pow{p}"), move |x| x.powf(p), move |x| p * x.powf(p - 1.0))
            .with_divided_difference(move |x, y| {
                // xᵖ (exp(p log(y/x)) - 1)/(y - x)
                let r = ((y - x) / x).ln_1p();
                x.powf(p) * (p * r).exp_m1() / (y - x)
            })
    }
}

/// First divided difference `f^[1](x, y)`: the chord slope when
/// `|x - y| > EPS_DD·max(|x|, |y|)`, otherwise `f'` at the midpoint.
/// Symmetric in its arguments.
pub fn divided_difference(f: &UnivariateFn, x: f64, y: f64) -> f64 {
    let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
    if (hi - lo) > EPS_DD * lo.abs().max(hi.abs()) {
        match &f.dd {
            Some(dd) => dd(lo, hi),
            None => (f.eval(hi) - f.eval(lo)) / (hi - lo),
        }
    } else {
        f.deriv(0.5 * (lo + hi))
    }
}
