//! Coordinates in the Frobenius-orthonormal basis of Sym(n):
//! first the diagonal units `Eᵢᵢ`, then `Eᵢⱼ = (Cᵢⱼ + Cⱼᵢ)/√2` for `i < j`
//! in row-major order.

use nalgebra::{DMatrix, DVector};

use super::{EigenDecomp, SymMatrix};

/// Dimension of Sym(n).
pub fn sym_dim(n: usize) -> usize {
    n * (n + 1) / 2
}

fn offdiag_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// Index `k` to the pair `(i, j)` of the basis element (`i == j` on the diagonal).
pub(crate) fn basis_pair(n: usize, k: usize) -> (usize, usize) {
    if k < n {
        (k, k)
    } else {
        offdiag_pairs(n).nth(k - n).expect("basis index out of range")
    }
}

pub fn basis_element(n: usize, k: usize) -> SymMatrix {
    let (i, j) = basis_pair(n, k);
    let mut m = DMatrix::zeros(n, n);
    if i == j {
        m[(i, i)] = 1.0;
    } else {
        m[(i, j)] = std::f64::consts::FRAC_1_SQRT_2;
        m[(j, i)] = std::f64::consts::FRAC_1_SQRT_2;
    }
    SymMatrix::new(m)
}

pub fn to_coords(x: &SymMatrix) -> DVector<f64> {
    let n = x.n();
    let m = x.as_matrix();
    let mut v = DVector::zeros(sym_dim(n));
    for i in 0..n {
        v[i] = m[(i, i)];
    }
    for (k, (i, j)) in offdiag_pairs(n).enumerate() {
        v[n + k] = std::f64::consts::SQRT_2 * m[(i, j)];
    }
    v
}

pub fn from_coords(n: usize, v: &DVector<f64>) -> SymMatrix {
    assert_eq!(v.len(), sym_dim(n), "coordinate vector has wrong length");
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = v[i];
    }
    for (k, (i, j)) in offdiag_pairs(n).enumerate() {
        let a = v[n + k] * std::f64::consts::FRAC_1_SQRT_2;
        m[(i, j)] = a;
        m[(j, i)] = a;
    }
    SymMatrix::new(m)
}

/// Orthogonal matrix `T` with `coords(Pᵀ X P) = T · coords(X)`.
pub fn eigenbasis_transform(e: &EigenDecomp) -> DMatrix<f64> {
    let n = e.n();
    let big = sym_dim(n);
    let mut t = DMatrix::zeros(big, big);
    for k in 0..big {
        let xk = basis_element(n, k);
        let col = to_coords(&SymMatrix::new(e.to_eigenbasis(&xk)));
        t.set_column(k, &col);
    }
    t
}
