//! Cyclic Jacobi eigensolver for real symmetric matrices.
//!
//! Jacobi rotations are slower than tridiagonal QR but deliver eigenvalues with
//! high relative accuracy on positive definite input, and the rotation order is
//! fixed, so the output is bit-for-bit reproducible for a given input.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 64;

/// Relative gap under which two eigenvalues are treated as one repeated value
/// when the eigenvectors are canonicalized.
pub(crate) const CLUSTER_TOL: f64 = 1e-12;

/// Raw Jacobi diagonalization: returns (eigenvalues, eigenvectors) unsorted.
pub(crate) fn jacobi(a: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = a.norm();
    if n <= 1 || scale == 0.0 {
        return Ok((a.diagonal(), v));
    }
    let floor = scale * 1e-300_f64.max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() <= floor {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                // Negligible relative to both diagonal entries: the rotation
                // would not change either eigenvalue at working precision.
                if apq.abs() <= 0.25 * f64::EPSILON * (app.abs() * aqq.abs()).sqrt() {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                rotated = true;
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    if k != p && k != q {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        let nkp = c * akp - s * akq;
                        let nkq = s * akp + c * akq;
                        a[(k, p)] = nkp;
                        a[(p, k)] = nkp;
                        a[(k, q)] = nkq;
                        a[(q, k)] = nkq;
                    }
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        if !rotated {
            return Ok((a.diagonal(), v));
        }
    }
    let mut off = 0.0;
    for p in 0..n {
        for q in p + 1..n {
            off += 2.0 * a[(p, q)] * a[(p, q)];
        }
    }
    Err(Error::NoConvergence {
        sweeps: MAX_SWEEPS,
        off_norm: off.sqrt(),
    })
}

/// Sorts eigenpairs ascending and makes the eigenvectors canonical: inside a
/// cluster of repeated eigenvalues the basis is rebuilt from the coordinate
/// vectors e_1, e_2, ... projected on the eigenspace (Gram-Schmidt in index
/// order), and every column gets a positive first nonzero component.
pub(crate) fn canonicalize(d: DVector<f64>, v: DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = d.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]).then(i.cmp(&j)));
    let d = DVector::from_iterator(n, order.iter().map(|&i| d[i]));
    let mut p = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);

    let scale = d.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (d[end] - d[end - 1]).abs() <= CLUSTER_TOL * scale {
            end += 1;
        }
        if end - start > 1 {
            rebuild_cluster(&mut p, start, end);
        }
        start = end;
    }

    for c in 0..n {
        let lead = (0..n).map(|r| p[(r, c)]).find(|x| x.abs() > 1e-12);
        if let Some(x) = lead {
            if x < 0.0 {
                for r in 0..n {
                    p[(r, c)] = -p[(r, c)];
                }
            }
        }
    }
    (d, p)
}

fn rebuild_cluster(p: &mut DMatrix<f64>, start: usize, end: usize) {
    let n = p.nrows();
    let k = end - start;
    let block = p.columns(start, k).into_owned();
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(k);
    for i in 0..n {
        if basis.len() == k {
            break;
        }
        // projection of e_i on the eigenspace
        let coeffs = block.row(i).transpose();
        let mut w = &block * coeffs;
        for b in &basis {
            let c = b.dot(&w);
            w.axpy(-c, b, 1.0);
        }
        for b in &basis {
            let c = b.dot(&w);
            w.axpy(-c, b, 1.0);
        }
        let norm = w.norm();
        if norm > 1e-3 {
            basis.push(w / norm);
        }
    }
    if basis.len() == k {
        for (j, b) in basis.iter().enumerate() {
            p.set_column(start + j, b);
        }
    }
}
