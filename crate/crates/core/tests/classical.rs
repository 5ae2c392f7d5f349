mod common;

use common::{close, fd_riemann_xyxy, koszul_christoffel, mat_close, procrustes3, shifted};
use spdgeo::classical_metrics::{
    bw_quotient_check, connection, dist, exp_map, geodesic_domain, riemann_xyxy, sectional_curvature, MetricId,
};
use spdgeo::inner_products::{fpq_map, STParams};
use spdgeo::invariant_metrics::eval;
use spdgeo::sampling::{gaussian_matrix, random_spd, random_sym, random_unit_sym, rng};
use spdgeo::{SpdMatrix, SymMatrix};

fn all_metrics() -> Vec<MetricId> {
    vec![
        MetricId::euclidean(1.3, 0.2).unwrap(),
        MetricId::log_euclidean(0.7, 0.4).unwrap(),
        MetricId::affine_invariant(1.5, 0.3).unwrap(),
        MetricId::bures_wasserstein(),
        MetricId::bkm(),
        MetricId::polar_affine(0.8, 0.1).unwrap(),
    ]
}

fn closed_form_metrics() -> Vec<MetricId> {
    all_metrics().into_iter().filter(|m| m.kind != spdgeo::classical_metrics::MetricKind::Bkm).collect()
}

#[test]
fn connections_match_koszul_oracle() {
    let mut r = rng(2001);
    for id in all_metrics() {
        for n in [2, 3] {
            let s = random_spd(&mut r, n, 0.5, 3.0);
            let (x, y) = (random_unit_sym(&mut r, n), random_unit_sym(&mut r, n));
            let zero = SymMatrix::zeros(n);
            let analytic = connection(&id, &s, &x, &y, &zero).unwrap();
            let oracle = koszul_christoffel(&id, &s, &x, &y, 1e-3 * s.eigenvalues()[0]);
            assert!(mat_close(&analytic, &oracle, 1e-7), "{id} n={n}: {analytic:?} vs {oracle:?}");
        }
    }
}

#[test]
fn curvature_matches_metric_only_oracle() {
    let mut r = rng(2002);
    for id in all_metrics() {
        for n in [2, 3] {
            let s = random_spd(&mut r, n, 0.5, 3.0);
            let (x, y) = (random_unit_sym(&mut r, n), random_unit_sym(&mut r, n));
            let scale = eval(&id, &s, &x, &x).unwrap() * eval(&id, &s, &y, &y).unwrap();
            let analytic = riemann_xyxy(&id, &s, &x, &y).unwrap();
            let oracle = fd_riemann_xyxy(&id, &s, &x, &y);
            assert!(
                (analytic - oracle).abs() <= 1e-6 * scale,
                "{id} n={n}: {analytic} vs {oracle} (scale {scale})"
            );
        }
    }
}

#[test]
fn bw_curvature_example() {
    let i2 = SpdMatrix::identity(2);
    // X = ΣX⁰ + X⁰Σ at Σ = I
    let x = SymMatrix::from_row_slice(2, &[0.0, 2.0, 2.0, 0.0]);
    let y = SymMatrix::from_diagonal(&[2.0, -2.0]);
    let bw = MetricId::bures_wasserstein();
    assert!(close(riemann_xyxy(&bw, &i2, &x, &y).unwrap(), 6.0, 1e-12));
    assert!(close(fd_riemann_xyxy(&bw, &i2, &x, &y), 6.0, 1e-6));
}

#[test]
fn distance_along_geodesics() {
    let mut r = rng(2003);
    for id in closed_form_metrics() {
        for i in 0..200 {
            let n = 1 + i % 4;
            let s = random_spd(&mut r, n, 0.2, 5.0);
            let x = random_sym(&mut r, n);
            let t = 0.1 * geodesic_domain(&id, &s, &x).unwrap().t_hi.min(1.0);
            let end = exp_map(&id, &s, &x, t).unwrap();
            let expected = t * eval(&id, &s, &x, &x).unwrap().sqrt();
            let d = dist(&id, &s, &end).unwrap();
            assert!((d - expected).abs() <= 1e-7 * expected, "{id}: {d} vs {expected}");
        }
    }
}

#[test]
fn connections_are_metric_compatible() {
    // γ(t) = Σ + tX, V(t) = Y + tZ: d/dt g(V, V) = 2 g(∇_γ̇V, V)
    let mut r = rng(2004);
    for id in all_metrics() {
        for _ in 0..20 {
            let n = 3;
            let s = random_spd(&mut r, n, 0.5, 3.0);
            let (x, y, z) = (random_unit_sym(&mut r, n), random_sym(&mut r, n), random_sym(&mut r, n));
            let h = 1e-3;
            let g = |t: f64| {
                let v = &y + &z.scale(t);
                eval(&id, &shifted(&s, &x, t), &v, &v).unwrap()
            };
            let lhs = (g(-2.0 * h) - 8.0 * g(-h) + 8.0 * g(h) - g(2.0 * h)) / (12.0 * h);
            let nabla = connection(&id, &s, &x, &y, &z).unwrap();
            let rhs = 2.0 * eval(&id, &s, &nabla, &y).unwrap();
            assert!((lhs - rhs).abs() <= 1e-5 * (1.0 + lhs.abs()), "{id}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn two_parameter_metrics_are_pullbacks() {
    let mut r = rng(2005);
    for i in 0..200 {
        let n = 1 + i % 4;
        let alpha = 0.2 + 2.0 * (i as f64 / 200.0);
        let beta = [-0.8 * alpha / n as f64, 0.0, 0.7][i % 3];
        let st = STParams::new(alpha, beta, n).unwrap();
        let (s, l) = (random_spd(&mut r, n, 0.2, 5.0), random_spd(&mut r, n, 0.2, 5.0));

        let e = dist(&MetricId::euclidean(alpha, beta).unwrap(), &s, &l).unwrap();
        let diff = s.as_sym() - l.as_sym();
        assert!(close(e, fpq_map(&st, &diff).norm(), 1e-9));

        let le = dist(&MetricId::log_euclidean(alpha, beta).unwrap(), &s, &l).unwrap();
        let f = |m: &SpdMatrix| SpdMatrix::exp_sym(&fpq_map(&st, &m.log())).unwrap();
        let le_frob = dist(&MetricId::log_euclidean(1.0, 0.0).unwrap(), &f(&s), &f(&l)).unwrap();
        assert!(close(le, le_frob, 1e-9), "{le} vs {le_frob}");

        // f(Σ) = det(Σ)^{(p/q − 1)/n} Σ
        let ratio = st.p() / st.q();
        let g = |m: &SpdMatrix| {
            let logdet: f64 = m.eigenvalues().iter().map(|d| d.ln()).sum();
            SpdMatrix::new(m.as_sym().scale(((ratio - 1.0) / n as f64 * logdet).exp())).unwrap()
        };
        let ai = dist(&MetricId::affine_invariant(alpha, beta).unwrap(), &s, &l).unwrap();
        let ai0 = dist(&MetricId::affine_invariant(alpha, 0.0).unwrap(), &g(&s), &g(&l)).unwrap();
        assert!(close(ai, ai0, 1e-9), "{ai} vs {ai0}");
    }
}

#[test]
fn bw_distance_is_procrustes_in_dimension_three() {
    let mut r = rng(2006);
    let bw = MetricId::bures_wasserstein();
    for _ in 0..10 {
        let (s, l) = (random_spd(&mut r, 3, 0.2, 5.0), random_spd(&mut r, 3, 0.2, 5.0));
        let a = s.sqrt().as_matrix().clone();
        let b = l.sqrt().as_matrix().clone();
        let best = procrustes3(&mut r, &a, &b, 4);
        let d2 = dist(&bw, &s, &l).unwrap().powi(2);
        assert!((best - d2).abs() <= 1e-6 * (1.0 + d2), "{best} vs {d2}");
    }
}

#[test]
fn ai_geodesic_symmetry_is_an_isometry() {
    let mut r = rng(2007);
    let ai = MetricId::affine_invariant(1.2, 0.4).unwrap();
    for i in 0..200 {
        let n = 1 + i % 4;
        let s = random_spd(&mut r, n, 0.2, 5.0);
        let sym = |l: &SpdMatrix| {
            let m = s.as_matrix() * l.inverse().as_matrix() * s.as_matrix();
            SpdMatrix::from_matrix(m).unwrap()
        };
        let (l1, l2) = (random_spd(&mut r, n, 0.2, 5.0), random_spd(&mut r, n, 0.2, 5.0));
        let before = dist(&ai, &l1, &l2).unwrap();
        let after = dist(&ai, &sym(&l1), &sym(&l2)).unwrap();
        assert!(close(before, after, 1e-9), "{before} vs {after}");
    }
}

#[test]
fn curvature_signs() {
    let mut r = rng(2008);
    let ai = MetricId::affine_invariant(0.9, 0.2).unwrap();
    let bw = MetricId::bures_wasserstein();
    let bkm = MetricId::bkm();
    let mut bkm_signs = [0usize; 2];
    for i in 0..300 {
        let n = 2 + i % 3;
        let s = random_spd(&mut r, n, 0.2, 5.0);
        let (x, y) = (random_sym(&mut r, n), random_sym(&mut r, n));
        assert!(sectional_curvature(&ai, &s, &x, &y).unwrap() <= 1e-12);
        assert!(sectional_curvature(&bw, &s, &x, &y).unwrap() >= -1e-12);
        // the BKM sign is only recorded
        let k = sectional_curvature(&bkm, &s, &x, &y).unwrap();
        bkm_signs[usize::from(k > 0.0)] += 1;
    }
    println!("BKM sectional curvature: {} negative, {} positive", bkm_signs[0], bkm_signs[1]);
}

#[test]
fn bw_quotient_on_random_fibres() {
    let mut r = rng(2009);
    for n in 1..5 {
        for _ in 0..10 {
            let a = gaussian_matrix(&mut r, n, n) + nalgebra::DMatrix::identity(n, n) * 2.0;
            let x = random_sym(&mut r, n);
            let rep = bw_quotient_check(&a, &x).unwrap();
            assert!(rep.passes(1e-10), "{rep:?}");
        }
    }
    let singular = nalgebra::DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
    assert!(bw_quotient_check(&singular, &SymMatrix::identity(2)).is_err());
}
