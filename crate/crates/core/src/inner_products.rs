//! O(n)-invariant inner products on Sym(n) and their generalizations
//! invariant under sign changes (`D±`) or signed permutations (`S±`).

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::symlin::SymMatrix;

/// Parameters of `α tr(XY) + β tr(X) tr(Y)`, valid when `min(α, α + nβ) > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct STParams {
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
}

impl STParams {
    pub fn new(alpha: f64, beta: f64, n: usize) -> Result<Self> {
        let p = Self { alpha, beta, n };
        p.validate()?;
        Ok(p)
    }

    /// Frobenius parameters `(1, 0)`.
    pub fn frobenius(n: usize) -> Self {
        Self {
            alpha: 1.0,
            beta: 0.0,
            n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let lo = self.alpha.min(self.alpha + self.n as f64 * self.beta);
        if !(lo > 0.0) || self.n == 0 {
            return Err(Error::InvalidSpec(format!(
                "(alpha, beta) = ({}, {}) outside min(alpha, alpha + n beta) > 0 for n = {}",
                self.alpha, self.beta, self.n
            )));
        }
        Ok(())
    }

    /// Same `(α, β)` in another dimension.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::new(self.alpha, self.beta, n)
    }

    /// `p = √(α + nβ)`.
    pub fn p(&self) -> f64 {
        (self.alpha + self.n as f64 * self.beta).sqrt()
    }

    /// `q = √α`.
    pub fn q(&self) -> f64 {
        self.alpha.sqrt()
    }

    /// Parameters of the dual inner product on covectors.
    pub fn dual(&self) -> STParams {
        let a = self.alpha;
        let nb = self.n as f64 * self.beta;
        STParams {
            alpha: 1.0 / a,
            beta: -self.beta / (a * (a + nb)),
            n: self.n,
        }
    }
}

fn same_dim(x: &SymMatrix, y: &SymMatrix) -> Result<()> {
    y.check_dim(x.n())
}

/// `α tr(XY) + β tr(X) tr(Y)`.
pub fn onp_inner(p: &STParams, x: &SymMatrix, y: &SymMatrix) -> Result<f64> {
    same_dim(x, y)?;
    x.check_dim(p.n)?;
    Ok(p.alpha * x.dot(y) + p.beta * x.trace() * y.trace())
}

/// Isometry `F(X) = qX + ((p - q)/n) tr(X) I` from `(Sym(n), onp_inner)` to
/// `(Sym(n), Frobenius)`.
pub fn fpq_map(p: &STParams, x: &SymMatrix) -> SymMatrix {
    let (pp, q) = (p.p(), p.q());
    let n = x.n();
    let shift = (pp - q) / n as f64 * x.trace();
    SymMatrix::new(x.as_matrix() * q + DMatrix::identity(n, n) * shift)
}

/// Inverse of [`fpq_map`].
pub fn fpq_map_inv(p: &STParams, x: &SymMatrix) -> SymMatrix {
    let (pp, q) = (p.p(), p.q());
    let n = x.n();
    let shift = (1.0 / pp - 1.0 / q) / n as f64 * x.trace();
    SymMatrix::new(x.as_matrix() / q + DMatrix::identity(n, n) * shift)
}

/// `Σ_{i≠j} αᵢⱼ XᵢⱼYᵢⱼ + Σ_{i,j} Sᵢⱼ XᵢᵢYⱼⱼ`, invariant under `X ↦ εXε` for
/// diagonal sign matrices `ε`.
#[derive(Clone, Debug, PartialEq)]
pub struct DpmInnerSpec {
    pub alpha: DMatrix<f64>,
    pub s: DMatrix<f64>,
}

impl DpmInnerSpec {
    pub fn new(alpha: DMatrix<f64>, s: DMatrix<f64>) -> Result<Self> {
        let spec = Self { alpha, s };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.s.nrows();
        if !self.s.is_square() || self.alpha.nrows() != n || self.alpha.ncols() != n {
            return Err(Error::InvalidSpec("alpha and S must be n×n".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && !(self.alpha[(i, j)] > 0.0) {
                    return Err(Error::InvalidSpec(format!("alpha[{i}][{j}] must be positive")));
                }
                if self.alpha[(i, j)] != self.alpha[(j, i)] || self.s[(i, j)] != self.s[(j, i)] {
                    return Err(Error::InvalidSpec("alpha and S must be symmetric".into()));
                }
            }
        }
        if self.s.clone().cholesky().is_none() {
            return Err(Error::InvalidSpec("S is not positive definite".into()));
        }
        Ok(())
    }
}

pub fn dpm_inner(spec: &DpmInnerSpec, x: &SymMatrix, y: &SymMatrix) -> Result<f64> {
    same_dim(x, y)?;
    x.check_dim(spec.s.nrows())?;
    let (xm, ym) = (x.as_matrix(), y.as_matrix());
    let n = x.n();
    let mut off = 0.0;
    let mut diag = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                off += spec.alpha[(i, j)] * xm[(i, j)] * ym[(i, j)];
            }
            diag += spec.s[(i, j)] * xm[(i, i)] * ym[(j, j)];
        }
    }
    Ok(off + diag)
}

/// `γ Σᵢ XᵢᵢYᵢᵢ + α Σ_{i≠j} XᵢⱼYᵢⱼ + β Σ_{i≠j} XᵢᵢYⱼⱼ`, invariant under signed
/// permutations. Valid when `α > 0`, `γ > β`, `γ + (n−1)β > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpmInnerSpec {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl SpmInnerSpec {
    pub fn validate(&self, n: usize) -> Result<()> {
        let ok = self.alpha > 0.0
            && self.gamma > self.beta
            && self.gamma + (n as f64 - 1.0) * self.beta > 0.0;
        if !ok {
            return Err(Error::InvalidSpec(format!(
                "(alpha, beta, gamma) = ({}, {}, {}) violates alpha > 0, gamma > beta, gamma + (n-1) beta > 0 at n = {n}",
                self.alpha, self.beta, self.gamma
            )));
        }
        Ok(())
    }
}

pub fn spm_inner(spec: &SpmInnerSpec, x: &SymMatrix, y: &SymMatrix) -> Result<f64> {
    same_dim(x, y)?;
    let n = x.n();
    spec.validate(n)?;
    let (xm, ym) = (x.as_matrix(), y.as_matrix());
    let mut diag = 0.0;
    let mut off = 0.0;
    let mut cross = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                diag += xm[(i, i)] * ym[(i, i)];
            } else {
                off += xm[(i, j)] * ym[(i, j)];
                cross += xm[(i, i)] * ym[(j, j)];
            }
        }
    }
    Ok(spec.gamma * diag + spec.alpha * off + spec.beta * cross)
}
