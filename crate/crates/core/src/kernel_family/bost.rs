use nalgebra::DMatrix;

use super::{psi_apply, KernelSpec};
use crate::error::{Error, Result};
use crate::invariant_metrics::{EigenForm, InvariantMetric};
use crate::symlin::{SpdMatrix, SymMatrix};

/// Kernel metric with scaling and trace factors:
/// `g = α tr(Ψ_Σ(X)²) + β tr(Ψ_Σ(X))²`.
#[derive(Clone, Debug)]
pub struct BostSpec {
    pub phi: KernelSpec,
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
}

impl BostSpec {
    pub fn new(phi: KernelSpec, alpha: f64, beta: f64, n: usize) -> Result<Self> {
        let b = Self { phi, alpha, beta, n };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !(self.alpha + self.n as f64 * self.beta > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "BOST factors need alpha > 0 and alpha + n beta > 0 (alpha = {}, beta = {}, n = {})",
                self.alpha, self.beta, self.n
            )));
        }
        Ok(())
    }

    fn form(&self, d: &[f64], phi: impl Fn(f64, f64) -> f64, alpha: f64, beta: f64) -> EigenForm {
        let n = d.len();
        let v: Vec<f64> = d.iter().map(|&x| phi(x, x).powf(-0.5)).collect();
        EigenForm {
            alpha: DMatrix::from_fn(n, n, |i, j| alpha / phi(d[i], d[j])),
            s: DMatrix::from_fn(n, n, |i, j| {
                v[i] * v[j] * (beta + if i == j { alpha } else { 0.0 })
            }),
        }
    }
}

impl InvariantMetric for BostSpec {
    fn eigen_form(&self, d: &[f64]) -> Result<EigenForm> {
        if d.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: d.len(),
            });
        }
        Ok(self.form(d, |x, y| self.phi.phi(x, y), self.alpha, self.beta))
    }

    fn co_eigen_form(&self, d: &[f64]) -> Result<EigenForm> {
        bost_cometric(self).eigen_form(d)
    }

    fn label(&self) -> String {
        format!("bost({}, {}, {})", self.phi.name(), self.alpha, self.beta)
    }
}

/// `α tr(Ψ(X)Ψ(Y)) + β tr(Ψ(X)) tr(Ψ(Y))`.
pub fn bost_eval(b: &BostSpec, sigma: &SpdMatrix, x: &SymMatrix, y: &SymMatrix) -> Result<f64> {
    sigma.check_dim(x)?;
    sigma.check_dim(y)?;
    if sigma.n() != b.n {
        return Err(Error::DimensionMismatch {
            expected: b.n,
            got: sigma.n(),
        });
    }
    let px = psi_apply(&b.phi, sigma, x)?;
    let py = psi_apply(&b.phi, sigma, y)?;
    Ok(b.alpha * px.dot(&py) + b.beta * px.trace() * py.trace())
}

/// Cometric kernel `1/φ`.
pub fn bod_cometric(k: &KernelSpec) -> KernelSpec {
    let k2 = k.clone();
    KernelSpec::new(format!("1/{}", k.name()), move |x, y| 1.0 / k2.phi(x, y))
}

/// Cometric of a BOST metric: `(1/φ, 1/α, −β/(α(α + nβ)))`.
pub fn bost_cometric(b: &BostSpec) -> BostSpec {
    let a = b.alpha;
    let nb = b.n as f64 * b.beta;
    BostSpec {
        phi: bod_cometric(&b.phi),
        alpha: 1.0 / a,
        beta: -b.beta / (a * (a + nb)),
        n: b.n,
    }
}
