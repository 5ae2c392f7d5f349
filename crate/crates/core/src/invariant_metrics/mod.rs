//! General O(n)-invariant metrics.
//!
//! At `Σ = P Diag(d) Pᵀ` such a metric reads, with `X' = Pᵀ X P`,
//!
//! ```text
//! g_Σ(X, X) = Σ_{i≠j} αᵢⱼ(d) X'ᵢⱼ² + Σ_{i,j} Sᵢⱼ(d) X'ᵢᵢ X'ⱼⱼ
//! ```
//!
//! [`EigenForm`] holds the weights `αᵢⱼ` and the diagonal block `S` at one
//! spectrum; [`InvariantMetric`] is implemented by every metric family of the
//! crate, so evaluation, Gram matrices and cometrics share one code path.
//! [`MetricTriple`] is the most general member: three functions of the
//! eigenvalue vector.

mod continuity;
mod triple;
mod validation;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::symlin::{eigenbasis_transform, sym_dim, EigenDecomp, SpdMatrix, SymMatrix};

pub use continuity::{eig_continuity_bounds, eig_continuity_bounds_with, polar_orthogonal, ContinuityBounds};
pub use triple::{
    cometric_eval, inversion_invariance_check, metric_eval, pullback_triple,
    scaling_invariance_check, InvarianceReport, MetricTriple, TripleFn,
};
pub use validation::{validate_triple, ConditionResult, SamplingGrid, ValidationReport};

/// Alias kept for the characterization vocabulary: the diagonal block at `d`.
pub type SMatrix = DMatrix<f64>;

/// Metric coefficients at a diagonal point.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenForm {
    /// Off-diagonal weights `αᵢⱼ` (symmetric; the diagonal is ignored).
    pub alpha: DMatrix<f64>,
    /// Diagonal block `S(d)`.
    pub s: SMatrix,
}

impl EigenForm {
    pub fn n(&self) -> usize {
        self.s.nrows()
    }

    /// Bilinear form on matrices already expressed in the eigenbasis.
    pub fn bilinear(&self, xp: &DMatrix<f64>, yp: &DMatrix<f64>) -> f64 {
        let n = self.n();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    acc += self.alpha[(i, j)] * xp[(i, j)] * yp[(i, j)];
                }
                acc += self.s[(i, j)] * xp[(i, i)] * yp[(j, j)];
            }
        }
        acc
    }

    /// Gram matrix in the orthonormal basis of Sym(n) attached to the
    /// eigenbasis: `S` on the diagonal units, `αᵢⱼ` on `Eᵢⱼ`.
    pub fn gram(&self) -> DMatrix<f64> {
        let n = self.n();
        let big = sym_dim(n);
        let mut g = DMatrix::zeros(big, big);
        g.view_mut((0, 0), (n, n)).copy_from(&self.s);
        let mut k = n;
        for i in 0..n {
            for j in i + 1..n {
                g[(k, k)] = self.alpha[(i, j)];
                k += 1;
            }
        }
        g
    }

    /// Dual form: `1/αᵢⱼ` and the dense inverse of `S`.
    pub fn dual_dense(&self) -> Result<EigenForm> {
        let n = self.n();
        let alpha = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { 1.0 / self.alpha[(i, j)] });
        for i in 0..n {
            for j in 0..n {
                if i != j && !(self.alpha[(i, j)].abs() > 0.0) {
                    return Err(Error::Conditioning(format!("alpha[{i}][{j}] vanishes")));
                }
            }
        }
        Ok(EigenForm {
            alpha,
            s: symmetric_inverse(&self.s)?,
        })
    }

    /// Smallest eigenvalue of the full form (min over `αᵢⱼ` and `λ(S)`).
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let n = self.n();
        let mut m = crate::symlin::eigh(&SymMatrix::new(self.s.clone()))?.d[0];
        for i in 0..n {
            for j in i + 1..n {
                m = m.min(self.alpha[(i, j)]);
            }
        }
        Ok(m)
    }
}

/// Inverse of a symmetric matrix through its eigendecomposition, refusing
/// numerically singular input.
pub fn symmetric_inverse(s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let e = crate::symlin::eigh(&SymMatrix::new(s.clone()))?;
    let amax = e.d.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let amin = e.d.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()));
    if !(amin > 1e-14 * amax) {
        return Err(Error::Conditioning(format!(
            "S(d) numerically singular (|eig| ranges over [{amin:e}, {amax:e}])"
        )));
    }
    Ok(e.map(|x| 1.0 / x).into_matrix())
}

/// An O(n)-invariant Riemannian metric on SPD(n), described by its form at
/// diagonal points.
///
/// Implementations must be invariant under simultaneous permutation of the
/// eigenvalues and the matrix indices.
pub trait InvariantMetric: Send + Sync {
    /// Coefficients of `g` at `Diag(d)`.
    fn eigen_form(&self, d: &[f64]) -> Result<EigenForm>;

    /// Coefficients of the cometric at `Diag(d)`. The default inverts the form
    /// densely; families with a closed-form cometric override it.
    fn co_eigen_form(&self, d: &[f64]) -> Result<EigenForm> {
        self.eigen_form(d)?.dual_dense()
    }

    fn label(&self) -> String {
        "metric".to_string()
    }
}

fn pair(e: &EigenDecomp, x: &SymMatrix, y: &SymMatrix) -> (DMatrix<f64>, DMatrix<f64>) {
    (e.to_eigenbasis(x), e.to_eigenbasis(y))
}

/// `g_Σ(X, Y)`.
pub fn eval<M: InvariantMetric + ?Sized>(
    m: &M,
    sigma: &SpdMatrix,
    x: &SymMatrix,
    y: &SymMatrix,
) -> Result<f64> {
    sigma.check_dim(x)?;
    sigma.check_dim(y)?;
    let form = m.eigen_form(sigma.eigenvalues())?;
    let (xp, yp) = pair(sigma.eig(), x, y);
    Ok(form.bilinear(&xp, &yp))
}

/// `g*_Σ(ω, ω')` with covectors identified to symmetric matrices by the
/// Frobenius pairing.
pub fn co_eval<M: InvariantMetric + ?Sized>(
    m: &M,
    sigma: &SpdMatrix,
    w: &SymMatrix,
    w2: &SymMatrix,
) -> Result<f64> {
    sigma.check_dim(w)?;
    sigma.check_dim(w2)?;
    let form = m.co_eigen_form(sigma.eigenvalues())?;
    let (xp, yp) = pair(sigma.eig(), w, w2);
    Ok(form.bilinear(&xp, &yp))
}

/// Gram matrix of `g_Σ` in the orthonormal basis `{Eᵢᵢ, Eᵢⱼ}` of Sym(n).
pub fn gram<M: InvariantMetric + ?Sized>(m: &M, sigma: &SpdMatrix) -> Result<DMatrix<f64>> {
    let g = m.eigen_form(sigma.eigenvalues())?.gram();
    let t = eigenbasis_transform(sigma.eig());
    Ok(t.transpose() * g * t)
}

/// Gram matrix of the cometric `g*_Σ` in the dual basis.
pub fn cogram<M: InvariantMetric + ?Sized>(m: &M, sigma: &SpdMatrix) -> Result<DMatrix<f64>> {
    let g = m.co_eigen_form(sigma.eigenvalues())?.gram();
    let t = eigenbasis_transform(sigma.eig());
    Ok(t.transpose() * g * t)
}

/// `‖Gram(g)·Gram(g*) − I‖_F` at `Σ`.
pub fn duality_defect<M: InvariantMetric + ?Sized>(m: &M, sigma: &SpdMatrix) -> Result<f64> {
    let g = gram(m, sigma)?;
    let gs = cogram(m, sigma)?;
    let k = g.nrows();
    Ok((g * gs - DMatrix::identity(k, k)).norm())
}

/// Gram matrix of `g_Σ` assembled by polarization, one evaluation per pair of
/// basis elements. Slow; kept as an independent check of [`gram`].
pub fn gram_by_polarization<M: InvariantMetric + ?Sized>(
    m: &M,
    sigma: &SpdMatrix,
) -> Result<DMatrix<f64>> {
    let n = sigma.n();
    let big = sym_dim(n);
    let basis: Vec<SymMatrix> = (0..big).map(|k| crate::symlin::basis_element(n, k)).collect();
    let mut g = DMatrix::zeros(big, big);
    for a in 0..big {
        for b in a..big {
            let v = eval(m, sigma, &basis[a], &basis[b])?;
            g[(a, b)] = v;
            g[(b, a)] = v;
        }
    }
    Ok(g)
}

/// Eigenvalue vector with the entries `i` and `j` moved to the front and the
/// others kept in index order: the argument layout of `α(d)` and `β(d)`.
pub fn arrange_pair(d: &[f64], i: usize, j: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(d.len());
    v.push(d[i]);
    v.push(d[j]);
    v.extend(d.iter().enumerate().filter(|&(k, _)| k != i && k != j).map(|(_, &x)| x));
    v
}

/// Eigenvalue vector with entry `i` first: the argument layout of `γ(d)`.
pub fn arrange_single(d: &[f64], i: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(d.len());
    v.push(d[i]);
    v.extend(d.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &x)| x));
    v
}
