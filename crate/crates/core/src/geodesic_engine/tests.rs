use super::*;
use crate::classical_metrics::parallel_transport;
use crate::invariant_metrics::eval;
use crate::kernel_family::builtin_kernel;
use crate::sampling::{random_spd, random_sym, rng};

fn mat_close(a: &SymMatrix, b: &SymMatrix, tol: f64) -> bool {
    (a.as_matrix() - b.as_matrix()).norm() <= tol * (1.0 + b.norm())
}

#[test]
fn flat_and_sharp() {
    let mut r = rng(80);
    let e = MetricId::euclidean(1.0, 0.0).unwrap();
    let s = random_spd(&mut r, 3, 0.2, 5.0);
    let x = random_sym(&mut r, 3);
    assert!((momentum_from_velocity(&e, &s, &x).unwrap() - to_coords(&x)).norm() < 1e-13);

    let (alpha, beta) = (1.5, 0.4);
    let ai = MetricId::affine_invariant(alpha, beta).unwrap();
    // α Σ⁻¹XΣ⁻¹ + β tr(Σ⁻¹X) Σ⁻¹
    let si = s.inverse();
    let tr = (si.as_matrix() * x.as_matrix()).trace();
    let expected = to_coords(&(&x.congruence(si.as_matrix()).scale(alpha) + &si.as_sym().scale(beta * tr)));
    let p = momentum_from_velocity(&ai, &s, &x).unwrap();
    assert!((&p - &expected).norm() < 1e-10 * expected.norm());

    let k = builtin_kernel("bures_wasserstein").unwrap();
    for m in [&ai as &dyn InvariantMetric, &k, &e] {
        let p = momentum_from_velocity(m, &s, &x).unwrap();
        let back = velocity_from_momentum(m, &s, &p).unwrap();
        assert!(mat_close(&back, &x, 1e-10));
    }
}

#[test]
fn hamiltonian_examples() {
    let i2 = SpdMatrix::identity(2);
    let ai = MetricId::affine_invariant(1.0, 0.0).unwrap();
    let cfg = IntegratorConfig::with_steps(100);
    let end = hamiltonian_geodesic(&ai, &i2, &SymMatrix::from_diagonal(&[1.0, -1.0]), 1.0, &cfg).unwrap();
    let e = std::f64::consts::E;
    assert!(mat_close(end.as_sym(), &SymMatrix::from_diagonal(&[e, 1.0 / e]), 1e-8));

    let bw = MetricId::bures_wasserstein();
    let end = hamiltonian_geodesic(&bw, &i2, &SymMatrix::identity(2), 1.0, &cfg).unwrap();
    assert!(mat_close(end.as_sym(), &SymMatrix::identity(2).scale(2.25), 1e-8));

    let mut r = rng(81);
    let s = random_spd(&mut r, 3, 0.2, 5.0);
    let traj = hamiltonian_trajectory(&ai, &s, &SymMatrix::zeros(3), 1.0, &cfg).unwrap();
    assert!(traj.points.iter().all(|p| mat_close(p.as_sym(), s.as_sym(), 1e-15)));
    assert_eq!(traj.times.len(), 101);
}

#[test]
fn hamiltonian_matches_closed_form_with_midpoint_too() {
    let mut r = rng(82);
    let le = MetricId::log_euclidean(1.0, 0.2).unwrap();
    let s = random_spd(&mut r, 3, 0.5, 2.0);
    let x = random_sym(&mut r, 3).scale(0.3);
    let exact = exp_map(&le, &s, &x, 1.0).unwrap();
    let cfg = IntegratorConfig {
        scheme: Scheme::Midpoint,
        steps: 400,
        ..IntegratorConfig::default()
    };
    let end = hamiltonian_geodesic(&le, &s, &x, 1.0, &cfg).unwrap();
    assert!(mat_close(end.as_sym(), exact.as_sym(), 1e-4));
}

#[test]
fn boundary_hit_is_reported() {
    let e = MetricId::euclidean(1.0, 0.0).unwrap();
    let i2 = SpdMatrix::identity(2);
    let res = hamiltonian_geodesic(&e, &i2, &SymMatrix::identity(2).scale(-1.0), 2.0, &IntegratorConfig::with_steps(30));
    match res {
        Err(Error::BoundaryHit { last_t }) => assert!(last_t <= 1.0 && last_t > 0.9, "{last_t}"),
        other => panic!("expected boundary hit, got {other:?}"),
    }
    let bad = IntegratorConfig::with_steps(0);
    assert!(hamiltonian_geodesic(&e, &i2, &SymMatrix::identity(2), 1.0, &bad).is_err());
}

#[test]
fn connection_transport_examples() {
    let mut r = rng(83);
    let cfg = IntegratorConfig::default();
    let (s, l) = (random_spd(&mut r, 3, 0.3, 3.0), random_spd(&mut r, 3, 0.3, 3.0));
    let x = random_sym(&mut r, 3);
    let ai = MetricId::affine_invariant(1.0, 0.0).unwrap();
    let ode = connection_transport(&ai, &s, &l, &x, &cfg).unwrap();
    assert!(mat_close(&ode, &parallel_transport(&ai, &s, &l, &x).unwrap(), 1e-7));
    let e = MetricId::euclidean(1.0, 0.0).unwrap();
    assert!(mat_close(&connection_transport(&e, &s, &l, &x, &cfg).unwrap(), &x, 1e-14));
    let le = MetricId::log_euclidean(1.0, 0.0).unwrap();
    let ode = connection_transport(&le, &s, &l, &x, &cfg).unwrap();
    assert!(mat_close(&ode, &parallel_transport(&le, &s, &l, &x).unwrap(), 1e-7));
    let pa = MetricId::polar_affine(1.0, 0.0).unwrap();
    let ode = connection_transport(&pa, &s, &l, &x, &cfg).unwrap();
    assert!(mat_close(&ode, &parallel_transport(&pa, &s, &l, &x).unwrap(), 1e-7));
    assert!(matches!(
        connection_transport(&MetricId::bkm(), &s, &l, &x, &cfg),
        Err(Error::Unsupported(_))
    ));
}

#[test]
fn bw_transport_examples() {
    let cfg = IntegratorConfig::default();
    let bw = MetricId::bures_wasserstein();
    let mut r = rng(84);
    let s = random_spd(&mut r, 3, 0.3, 3.0);
    let x = random_sym(&mut r, 3);
    assert!(mat_close(&bw_transport_ode(&s, &s, &x, &cfg).unwrap(), &x, 1e-12));
    let (i2, four) = (SpdMatrix::identity(2), SpdMatrix::from_diagonal(&[4.0, 4.0]).unwrap());
    let x2 = SymMatrix::from_row_slice(2, &[0.3, -1.2, -1.2, 2.0]);
    assert!(mat_close(&bw_transport_ode(&i2, &four, &x2, &cfg).unwrap(), &x2.scale(2.0), 1e-7));
    for _ in 0..5 {
        let l = random_spd(&mut r, 3, 0.3, 3.0);
        let v = bw_transport_ode(&s, &l, &x, &cfg).unwrap();
        let (a, b) = (eval(&bw, &l, &v, &v).unwrap(), eval(&bw, &s, &x, &x).unwrap());
        assert!((a - b).abs() <= 1e-7 * b, "{a} vs {b}");
        let c = connection_transport(&bw, &s, &l, &x, &cfg).unwrap();
        assert!(mat_close(&c, &v, 1e-7));
    }
}

#[test]
fn state_dimension_recovery() {
    let mut r = rng(85);
    for n in 1..6 {
        let s = random_spd(&mut r, n, 0.5, 2.0);
        let st = HamiltonianState {
            x: to_coords(s.as_sym()),
            p: to_coords(&random_sym(&mut r, n)),
        };
        assert_eq!(st.n(), n);
        assert!(mat_close(st.sigma().unwrap().as_sym(), s.as_sym(), 1e-15));
    }
}
