#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use spdgeo::invariant_metrics::{gram, InvariantMetric, MetricTriple, SamplingGrid};
use spdgeo::kernel_family::{BostSpec, KernelSpec, SeparableSpec};
use spdgeo::sampling::SeededRng;
use spdgeo::symlin::{basis_element, from_coords, sym_dim, to_coords};
use spdgeo::{SpdMatrix, SymMatrix};

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

pub fn rel_err(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

pub fn mat_close(a: &SymMatrix, b: &SymMatrix, tol: f64) -> bool {
    (a.as_matrix() - b.as_matrix()).norm() <= tol * (1.0 + b.norm())
}

pub fn random_kernel(r: &mut SeededRng) -> KernelSpec {
    let t1: f64 = r.gen_range(-2.0..2.0);
    let t2: f64 = r.gen_range(-1.0..1.0);
    let w: f64 = r.gen_range(0.1..3.0);
    KernelSpec::new("random", move |x, y| (x * y).powf(t1 / 2.0) + w * (0.5 * (x + y)).powf(t2))
}

pub fn random_bost(r: &mut SeededRng, n: usize) -> BostSpec {
    let alpha = r.gen_range(0.2..3.0);
    let beta = r.gen_range(-0.9 * alpha / n as f64..2.0);
    BostSpec::new(random_kernel(r), alpha, beta, n).expect("valid BOST factors")
}

/// Random separable spec passing validation in dimension `n`.
pub fn random_separable(r: &mut SeededRng, n: usize) -> SeparableSpec {
    loop {
        let k = random_kernel(r);
        let (a1, p1): (f64, f64) = (r.gen_range(-1.0..1.0) / n as f64, r.gen_range(-1.0..1.0));
        let (a2, p2): (f64, f64) = (r.gen_range(-1.0..1.0) / n as f64, r.gen_range(-1.0..1.0));
        let k2 = k.clone();
        let s = SeparableSpec::new(
            "random",
            move |x, y| k2.phi(x, y).powf(-0.5),
            move |x| a1 * x.powf(p1) / k.phi(x, x).sqrt(),
            move |x| a2 * x.powf(p2),
        );
        let grid = SamplingGrid {
            random_points: 50,
            ..SamplingGrid::default()
        };
        if s.validate(&grid, n).is_ok() {
            return s;
        }
    }
}

/// Random valid triple: a scalar field `h(d)` times a BOST-like form.
pub fn random_triple(r: &mut SeededRng, n: usize) -> MetricTriple {
    let e1: f64 = r.gen_range(-1.5..1.5);
    let e2: f64 = r.gen_range(-1.0..1.0);
    let c: f64 = r.gen_range(0.1..2.0);
    let b: f64 = r.gen_range(-0.9..2.0) / n as f64;
    let h = move |d: &[f64]| 1.0 + c * d.iter().map(|x| x.ln().tanh()).sum::<f64>().powi(2);
    let k = move |x: f64, y: f64| (x * y).powf(e1) + 0.3 * (x + y).powf(e1);
    let v = move |x: f64| {
        let t = x.powf(e2) / k(x, x).sqrt();
        t / (1.0 + t * t).sqrt()
    };
    MetricTriple::new(
        n,
        move |d| h(d) * k(d[0], d[1]),
        move |d| h(d) * b * (k(d[0], d[0]) * k(d[1], d[1])).sqrt() * v(d[0]) * v(d[1]),
        move |d| h(d) * k(d[0], d[0]) * (1.0 + b * v(d[0]).powi(2)),
    )
    .named("random")
}

/// `Σ + tV`, panicking if it leaves the cone.
pub fn shifted(sigma: &SpdMatrix, v: &SymMatrix, t: f64) -> SpdMatrix {
    SpdMatrix::new(sigma.as_sym() + &v.scale(t)).expect("stencil point stays SPD")
}

/// Fourth-order central difference of a vector-valued map along `v`.
pub fn fd4<F>(f: F, h: f64) -> DVector<f64>
where
    F: Fn(f64) -> DVector<f64>,
{
    (f(-2.0 * h) - f(-h) * 8.0 + f(h) * 8.0 - f(2.0 * h)) / (12.0 * h)
}

fn gram_flat<M: InvariantMetric + ?Sized>(m: &M, sigma: &SpdMatrix) -> DVector<f64> {
    let g = gram(m, sigma).unwrap();
    DVector::from_column_slice(g.as_slice())
}

/// `∂_V Gram` at `Σ` by a 4th-order stencil.
pub fn dgram<M: InvariantMetric + ?Sized>(m: &M, sigma: &SpdMatrix, v: &SymMatrix, h: f64) -> DMatrix<f64> {
    let k = sym_dim(sigma.n());
    let flat = fd4(|t| gram_flat(m, &shifted(sigma, v, t)), h);
    DMatrix::from_column_slice(k, k, flat.as_slice())
}

/// Christoffel term `Γ(X, Y)` of the Levi-Civita connection from the metric
/// alone, by the Koszul formula with constant coordinate fields.
pub fn koszul_christoffel<M: InvariantMetric + ?Sized>(
    m: &M,
    sigma: &SpdMatrix,
    x: &SymMatrix,
    y: &SymMatrix,
    h: f64,
) -> SymMatrix {
    let n = sigma.n();
    let k = sym_dim(n);
    let (xc, yc) = (to_coords(x), to_coords(y));
    let g = gram(m, sigma).unwrap();
    let dx = dgram(m, sigma, x, h);
    let dy = dgram(m, sigma, y, h);
    let mut rhs = &dx * &yc + &dy * &xc;
    for l in 0..k {
        let dz = dgram(m, sigma, &basis_element(n, l), h);
        rhs[l] -= xc.dot(&(&dz * &yc));
    }
    let sol = g.lu().solve(&(rhs * 0.5)).expect("Gram matrix invertible");
    from_coords(n, &sol)
}

/// `R(X, Y, X, Y) = g(R(X, Y)Y, X)` from the Koszul Christoffels:
/// `R(X, Y)Y = ∂_XΓ(Y, Y) − ∂_YΓ(X, Y) + Γ(X, Γ(Y, Y)) − Γ(Y, Γ(X, Y))`.
pub fn fd_riemann_xyxy<M: InvariantMetric + ?Sized>(m: &M, sigma: &SpdMatrix, x: &SymMatrix, y: &SymMatrix) -> f64 {
    let h_in = 1e-3 * sigma.eigenvalues()[0];
    let h_out = 1e-2 * sigma.eigenvalues()[0] / (1.0 + x.norm().max(y.norm()));
    let gamma = |s: &SpdMatrix, a: &SymMatrix, b: &SymMatrix| koszul_christoffel(m, s, a, b, h_in);
    let d_x = fd4(|t| to_coords(&gamma(&shifted(sigma, x, t), y, y)), h_out);
    let d_y = fd4(|t| to_coords(&gamma(&shifted(sigma, y, t), x, y)), h_out);
    let n = sigma.n();
    let gyy = gamma(sigma, y, y);
    let gxy = gamma(sigma, x, y);
    let r = from_coords(n, &(d_x - d_y)) + gamma(sigma, x, &gyy) - gamma(sigma, y, &gxy);
    spdgeo::invariant_metrics::eval(m, sigma, &r, x).unwrap()
}

/// Minimizer of a unimodal function on `[a, b]`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Nelder-Mead minimization from `x0` with initial simplex size `scale`.
pub fn nelder_mead(f: &dyn Fn(&[f64]) -> f64, x0: &[f64], scale: f64, iters: usize) -> (Vec<f64>, f64) {
    let k = x0.len();
    let mut pts: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..k {
        let mut p = x0.to_vec();
        p[i] += scale;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| f(p)).collect();
    for _ in 0..iters {
        let mut idx: Vec<usize> = (0..=k).collect();
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = idx.iter().map(|&i| pts[i].clone()).collect();
        vals = idx.iter().map(|&i| vals[i]).collect();
        if (vals[k] - vals[0]).abs() < 1e-15 * (1.0 + vals[0].abs()) {
            break;
        }
        let centroid: Vec<f64> = (0..k).map(|j| pts[..k].iter().map(|p| p[j]).sum::<f64>() / k as f64).collect();
        let along = |t: f64| -> Vec<f64> { (0..k).map(|j| centroid[j] + t * (pts[k][j] - centroid[j])).collect() };
        let xr = along(-1.0);
        let fr = f(&xr);
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = f(&xe);
            if fe < fr {
                pts[k] = xe;
                vals[k] = fe;
            } else {
                pts[k] = xr;
                vals[k] = fr;
            }
        } else if fr < vals[k - 1] {
            pts[k] = xr;
            vals[k] = fr;
        } else {
            let xc = along(if fr < vals[k] { -0.5 } else { 0.5 });
            let fc = f(&xc);
            if fc < vals[k].min(fr) {
                pts[k] = xc;
                vals[k] = fc;
            } else {
                for i in 1..=k {
                    pts[i] = (0..k).map(|j| pts[0][j] + 0.5 * (pts[i][j] - pts[0][j])).collect();
                    vals[i] = f(&pts[i]);
                }
            }
        }
    }
    let best = (0..=k).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    (pts[best].clone(), vals[best])
}

/// Rotation `exp([w]ₓ)` for a rotation vector `w` in R³ (Rodrigues).
pub fn rotation3(w: &[f64]) -> DMatrix<f64> {
    let theta = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
    let k = DMatrix::from_row_slice(3, 3, &[0.0, -w[2], w[1], w[2], 0.0, -w[0], -w[1], w[0], 0.0]);
    if theta < 1e-300 {
        return DMatrix::identity(3, 3);
    }
    let kn = &k / theta;
    DMatrix::identity(3, 3) + &kn * theta.sin() + &kn * &kn * (1.0 - theta.cos())
}

/// `min_U ‖A − BU‖²` over O(3) by Nelder-Mead restarts on both components.
pub fn procrustes3(r: &mut SeededRng, a: &DMatrix<f64>, b: &DMatrix<f64>, restarts: usize) -> f64 {
    let flip = DMatrix::from_diagonal(&DVector::from_column_slice(&[-1.0, 1.0, 1.0]));
    let mut best = f64::INFINITY;
    for comp in 0..2 {
        for _ in 0..restarts {
            let w0: Vec<f64> = (0..3).map(|_| r.gen_range(-3.0..3.0)).collect();
            let f = |w: &[f64]| {
                let mut u = rotation3(w);
                if comp == 1 {
                    u = &u * &flip;
                }
                (a - b * &u).norm_squared()
            };
            let (w, _) = nelder_mead(&f, &w0, 0.5, 4000);
            // polish from the found point
            let (_, v) = nelder_mead(&f, &w, 1e-3, 4000);
            best = best.min(v);
        }
    }
    best
}
