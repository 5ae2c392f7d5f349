//! Symmetric-matrix linear algebra.
//!
//! Points of the manifold are [`SpdMatrix`] values, tangent vectors and
//! covectors are [`SymMatrix`] values. Every matrix function is evaluated
//! through the eigendecomposition, and the differential of a univariate map
//! uses the first divided difference of the scalar function in the eigenbasis.

mod basis;
mod eigen;
mod univariate;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub use basis::{basis_element, eigenbasis_transform, from_coords, sym_dim, to_coords};
pub use univariate::{divided_difference, UnivariateFn, EPS_DD};

/// SPD rejection threshold: smallest eigenvalue must exceed this times the largest.
pub const SPD_TOL: f64 = 1e-12;

/// Dense real symmetric matrix. Construction symmetrizes the input.
#[derive(Clone, PartialEq)]
pub struct SymMatrix {
    m: DMatrix<f64>,
}

impl SymMatrix {
    /// Builds `(A + Aᵀ)/2`. Panics if `a` is not square.
    pub fn new(a: DMatrix<f64>) -> Self {
        assert!(a.is_square(), "symmetric matrix must be square");
        let m = (&a + a.transpose()) * 0.5;
        Self { m }
    }

    pub fn try_new(a: DMatrix<f64>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                got: a.ncols(),
            });
        }
        Ok(Self::new(a))
    }

    /// Row-major entries.
    pub fn from_row_slice(n: usize, data: &[f64]) -> Self {
        Self::new(DMatrix::from_row_slice(n, n, data))
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            m: DMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m: DMatrix::identity(n, n),
        }
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        Self {
            m: DMatrix::from_diagonal(&DVector::from_column_slice(d)),
        }
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.trace()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.m.norm()
    }

    /// Frobenius pairing tr(XY).
    pub fn dot(&self, other: &SymMatrix) -> f64 {
        self.m.dot(&other.m)
    }

    pub fn scale(&self, a: f64) -> SymMatrix {
        SymMatrix { m: &self.m * a }
    }

    /// `B X Bᵀ` for any square `B`.
    pub fn congruence(&self, b: &DMatrix<f64>) -> SymMatrix {
        SymMatrix::new(b * &self.m * b.transpose())
    }

    /// `Bᵀ X B` for any square `B`.
    pub fn congruence_t(&self, b: &DMatrix<f64>) -> SymMatrix {
        SymMatrix::new(b.transpose() * &self.m * b)
    }

    /// Anticommutator `XY + YX`.
    pub fn anticommutator(&self, other: &SymMatrix) -> SymMatrix {
        let p = &self.m * &other.m;
        SymMatrix::new(&p + p.transpose())
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if self.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.n(),
            });
        }
        Ok(())
    }

    /// Eigendecomposition of this (possibly indefinite) matrix.
    pub fn eigh(&self) -> Result<EigenDecomp> {
        eigh(self)
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymMatrix{}", self.m)
    }
}

impl Add for &SymMatrix {
    type Output = SymMatrix;
    fn add(self, rhs: &SymMatrix) -> SymMatrix {
        SymMatrix { m: &self.m + &rhs.m }
    }
}

impl Sub for &SymMatrix {
    type Output = SymMatrix;
    fn sub(self, rhs: &SymMatrix) -> SymMatrix {
        SymMatrix { m: &self.m - &rhs.m }
    }
}

impl Add for SymMatrix {
    type Output = SymMatrix;
    fn add(self, rhs: SymMatrix) -> SymMatrix {
        SymMatrix { m: self.m + rhs.m }
    }
}

impl Sub for SymMatrix {
    type Output = SymMatrix;
    fn sub(self, rhs: SymMatrix) -> SymMatrix {
        SymMatrix { m: self.m - rhs.m }
    }
}

impl Mul<f64> for &SymMatrix {
    type Output = SymMatrix;
    fn mul(self, a: f64) -> SymMatrix {
        self.scale(a)
    }
}

impl Mul<f64> for SymMatrix {
    type Output = SymMatrix;
    fn mul(self, a: f64) -> SymMatrix {
        SymMatrix { m: self.m * a }
    }
}

impl Neg for SymMatrix {
    type Output = SymMatrix;
    fn neg(self) -> SymMatrix {
        SymMatrix { m: -self.m }
    }
}

impl Neg for &SymMatrix {
    type Output = SymMatrix;
    fn neg(self) -> SymMatrix {
        SymMatrix { m: -&self.m }
    }
}

/// Orthogonal factor `p` and ascending eigenvalues `d` with `Σ = P Diag(d) Pᵀ`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenDecomp {
    pub p: DMatrix<f64>,
    pub d: DVector<f64>,
}

impl EigenDecomp {
    pub fn n(&self) -> usize {
        self.d.len()
    }

    /// `P Diag(f(d)) Pᵀ`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let fd = self.d.map(f);
        let scaled = DMatrix::from_fn(self.n(), self.n(), |r, c| self.p[(r, c)] * fd[c]);
        SymMatrix::new(scaled * self.p.transpose())
    }

    pub fn reconstruct(&self) -> SymMatrix {
        self.map(|x| x)
    }

    /// `X' = Pᵀ X P`.
    pub fn to_eigenbasis(&self, x: &SymMatrix) -> DMatrix<f64> {
        let m = self.p.transpose() * x.as_matrix() * &self.p;
        (&m + m.transpose()) * 0.5
    }

    /// `P M Pᵀ` for a matrix `M` given in the eigenbasis.
    pub fn from_eigenbasis(&self, m: &DMatrix<f64>) -> SymMatrix {
        SymMatrix::new(&self.p * m * self.p.transpose())
    }

    /// Applies `M'ᵢⱼ = w(i, j) X'ᵢⱼ` in the eigenbasis and maps back.
    pub fn hadamard(&self, x: &SymMatrix, w: impl Fn(usize, usize) -> f64) -> SymMatrix {
        let xp = self.to_eigenbasis(x);
        let n = self.n();
        let m = DMatrix::from_fn(n, n, |i, j| w(i, j) * xp[(i, j)]);
        self.from_eigenbasis(&m)
    }
}

/// Eigendecomposition with ascending eigenvalues and canonical eigenvectors
/// (repeated eigenvalues orthonormalized in index order, first nonzero
/// component of each column positive).
pub fn eigh(s: &SymMatrix) -> Result<EigenDecomp> {
    let (d, v) = eigen::jacobi(s.as_matrix())?;
    let (d, p) = eigen::canonicalize(d, v);
    Ok(EigenDecomp { p, d })
}

/// Symmetric positive definite matrix together with its eigendecomposition.
#[derive(Clone, PartialEq)]
pub struct SpdMatrix {
    base: SymMatrix,
    eig: EigenDecomp,
}

impl SpdMatrix {
    /// Validates positive definiteness: rejects `λ_min ≤ 1e-12·λ_max`.
    pub fn new(base: SymMatrix) -> Result<Self> {
        let eig = eigh(&base)?;
        Self::check(&eig)?;
        Ok(Self { base, eig })
    }

    pub fn from_matrix(a: DMatrix<f64>) -> Result<Self> {
        Self::new(SymMatrix::try_new(a)?)
    }

    pub fn from_row_slice(n: usize, data: &[f64]) -> Result<Self> {
        Self::new(SymMatrix::from_row_slice(n, data))
    }

    pub fn from_diagonal(d: &[f64]) -> Result<Self> {
        Self::new(SymMatrix::from_diagonal(d))
    }

    pub fn identity(n: usize) -> Self {
        Self::new(SymMatrix::identity(n)).expect("identity is SPD")
    }

    /// `P Diag(d) Pᵀ` from a known decomposition; `p` must be orthogonal.
    pub fn from_eigen(p: DMatrix<f64>, d: DVector<f64>) -> Result<Self> {
        let base = EigenDecomp { p, d }.reconstruct();
        Self::new(base)
    }

    fn check(eig: &EigenDecomp) -> Result<()> {
        let n = eig.n();
        if n == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        let min = eig.d[0];
        let max = eig.d[n - 1];
        if !(min > SPD_TOL * max) || !max.is_finite() {
            return Err(Error::NotPositiveDefinite {
                min_eig: min,
                max_eig: max,
            });
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn as_sym(&self) -> &SymMatrix {
        &self.base
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        self.base.as_matrix()
    }

    pub fn eig(&self) -> &EigenDecomp {
        &self.eig
    }

    pub fn eigenvalues(&self) -> &[f64] {
        self.eig.d.as_slice()
    }

    pub fn trace(&self) -> f64 {
        self.base.trace()
    }

    pub fn sqrt(&self) -> SpdMatrix {
        self.map_spd(f64::sqrt)
    }

    pub fn inv_sqrt(&self) -> SpdMatrix {
        self.map_spd(|x| 1.0 / x.sqrt())
    }

    pub fn inverse(&self) -> SpdMatrix {
        self.map_spd(|x| 1.0 / x)
    }

    pub fn powf(&self, p: f64) -> SpdMatrix {
        self.map_spd(|x| x.powf(p))
    }

    pub fn log(&self) -> SymMatrix {
        self.eig.map(f64::ln)
    }

    /// Matrix exponential of a symmetric matrix.
    pub fn exp_sym(x: &SymMatrix) -> Result<SpdMatrix> {
        let e = eigh(x)?;
        Ok(SpdMatrix::map_decomp(&e, f64::exp))
    }

    /// Positive map of the eigenvalues, reusing the eigenvectors.
    fn map_spd(&self, f: impl Fn(f64) -> f64) -> SpdMatrix {
        SpdMatrix::map_decomp(&self.eig, f)
    }

    fn map_decomp(e: &EigenDecomp, f: impl Fn(f64) -> f64) -> SpdMatrix {
        let base = e.map(&f);
        let fd = e.d.map(&f);
        // keep the decomposition consistent with the ascending convention
        let (d, p) = eigen::canonicalize(fd, e.p.clone());
        SpdMatrix {
            base,
            eig: EigenDecomp { p, d },
        }
    }

    /// Validates that `x` has this matrix's dimension.
    pub fn check_dim(&self, x: &SymMatrix) -> Result<()> {
        x.check_dim(self.n())
    }
}

impl fmt::Debug for SpdMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SpdMatrix{}", self.base.as_matrix())
    }
}

/// `f(Σ) = P f(D) Pᵀ`.
pub fn univariate_apply(f: &UnivariateFn, sigma: &SpdMatrix) -> Result<SymMatrix> {
    f.check_domain(sigma.eigenvalues())?;
    Ok(sigma.eig().map(|x| f.eval(x)))
}

/// `f` applied to a symmetric matrix whose spectrum lies in the domain of `f`.
pub fn univariate_apply_sym(f: &UnivariateFn, x: &SymMatrix) -> Result<SymMatrix> {
    let e = eigh(x)?;
    f.check_domain(e.d.as_slice())?;
    Ok(e.map(|v| f.eval(v)))
}

/// Daleckii-Krein differential `d_Σ f(X) = P [f^[1](dᵢ,dⱼ) X'ᵢⱼ] Pᵀ`.
pub fn univariate_diff(f: &UnivariateFn, sigma: &SpdMatrix, x: &SymMatrix) -> Result<SymMatrix> {
    sigma.check_dim(x)?;
    f.check_domain(sigma.eigenvalues())?;
    let e = sigma.eig();
    let d = &e.d;
    Ok(e.hadamard(x, |i, j| divided_difference(f, d[i], d[j])))
}

/// Inverse of the differential: divides by `f^[1](dᵢ,dⱼ)` in the eigenbasis.
pub fn univariate_diff_inv(
    f: &UnivariateFn,
    sigma: &SpdMatrix,
    x: &SymMatrix,
) -> Result<SymMatrix> {
    sigma.check_dim(x)?;
    f.check_domain(sigma.eigenvalues())?;
    let e = sigma.eig();
    let d = &e.d;
    Ok(e.hadamard(x, |i, j| 1.0 / divided_difference(f, d[i], d[j])))
}

/// Solution `X⁰` of `Σ X⁰ + X⁰ Σ = X`.
pub fn sylvester_lift(sigma: &SpdMatrix, x: &SymMatrix) -> SymMatrix {
    let e = sigma.eig();
    let d = &e.d;
    e.hadamard(x, |i, j| 1.0 / (d[i] + d[j]))
}

/// Principal square root `(ΣΛ)^{1/2} = Σ^{1/2}(Σ^{1/2}ΛΣ^{1/2})^{1/2}Σ^{-1/2}`.
pub fn sqrt_product(sigma: &SpdMatrix, lambda: &SpdMatrix) -> Result<DMatrix<f64>> {
    if sigma.n() != lambda.n() {
        return Err(Error::DimensionMismatch {
            expected: sigma.n(),
            got: lambda.n(),
        });
    }
    let s_half = sigma.sqrt();
    let inner = SpdMatrix::new(lambda.as_sym().congruence(s_half.as_matrix()))?;
    let mid = inner.sqrt();
    Ok(s_half.as_matrix() * mid.as_matrix() * sigma.inv_sqrt().as_matrix())
}

/// `tr((ΣΛ)^{1/2})`, read off the eigenvalues of `Σ^{1/2} Λ Σ^{1/2}`.
pub fn trace_sqrt_product(sigma: &SpdMatrix, lambda: &SpdMatrix) -> Result<f64> {
    let s_half = sigma.sqrt();
    let inner = SpdMatrix::new(lambda.as_sym().congruence(s_half.as_matrix()))?;
    Ok(inner.eigenvalues().iter().map(|x| x.sqrt()).sum())
}
