mod common;

use common::{mat_close, random_bost, random_triple};
use spdgeo::classical_metrics::{exp_map, parallel_transport, MetricId};
use spdgeo::geodesic_engine::{
    bw_transport_ode, connection_transport, hamiltonian_from_state, hamiltonian_geodesic, hamiltonian_trajectory,
    HamiltonianState, IntegratorConfig,
};
use spdgeo::invariant_metrics::{eval, InvariantMetric};
use spdgeo::kernel_family::builtin_kernel;
use spdgeo::sampling::{random_orthogonal, random_spd, random_sym, rng};
use spdgeo::symlin::to_coords;
use spdgeo::{SpdMatrix, SymMatrix};

fn unit<M: InvariantMetric + ?Sized>(m: &M, s: &SpdMatrix, x: &SymMatrix) -> SymMatrix {
    x.scale(1.0 / eval(m, s, x, x).unwrap().sqrt())
}

fn integrable() -> Vec<MetricId> {
    vec![
        MetricId::affine_invariant(1.0, 0.0).unwrap(),
        MetricId::affine_invariant(0.6, 0.5).unwrap(),
        MetricId::log_euclidean(1.0, 0.0).unwrap(),
        MetricId::log_euclidean(2.0, -0.3).unwrap(),
        MetricId::bures_wasserstein(),
    ]
}

#[test]
fn hamiltonian_is_conserved() {
    let mut r = rng(4001);
    let cfg = IntegratorConfig::with_steps(100);
    let mut metrics: Vec<Box<dyn InvariantMetric>> =
        integrable().into_iter().map(|m| Box::new(m) as Box<dyn InvariantMetric>).collect();
    metrics.push(Box::new(MetricId::bkm()));
    metrics.push(Box::new(random_bost(&mut r, 3)));
    for m in &metrics {
        for _ in 0..5 {
            let s = random_spd(&mut r, 3, 1.0, 4.0);
            let x = unit(m.as_ref(), &s, &random_sym(&mut r, 3)).scale(0.5);
            let traj = hamiltonian_trajectory(m.as_ref(), &s, &x, 1.0, &cfg).unwrap();
            assert!(traj.energy_drift() <= 1e-8, "{}: drift {:e}", m.label(), traj.energy_drift());
        }
    }
}

#[test]
fn integration_is_time_reversible() {
    let mut r = rng(4002);
    let cfg = IntegratorConfig::with_steps(100);
    let mut metrics: Vec<Box<dyn InvariantMetric>> =
        integrable().into_iter().map(|m| Box::new(m) as Box<dyn InvariantMetric>).collect();
    metrics.push(Box::new(MetricId::bkm()));
    for m in &metrics {
        for _ in 0..3 {
            let s = random_spd(&mut r, 3, 1.0, 4.0);
            let x = unit(m.as_ref(), &s, &random_sym(&mut r, 3)).scale(0.5);
            let fwd = hamiltonian_trajectory(m.as_ref(), &s, &x, 1.0, &cfg).unwrap();
            let back = HamiltonianState {
                x: to_coords(fwd.endpoint().as_sym()),
                p: -fwd.momenta.last().unwrap(),
            };
            let home = hamiltonian_from_state(m.as_ref(), &back, 1.0, &cfg).unwrap();
            assert!(mat_close(home.endpoint().as_sym(), s.as_sym(), 1e-8), "{}", m.label());
        }
    }
}

#[test]
fn integration_is_equivariant() {
    let mut r = rng(4003);
    let cfg = IntegratorConfig::with_steps(40);
    for n in [2, 3] {
        let metrics: Vec<Box<dyn InvariantMetric>> = vec![
            Box::new(MetricId::affine_invariant(1.0, 0.2).unwrap()),
            Box::new(MetricId::bures_wasserstein()),
            Box::new(random_bost(&mut r, n)),
            Box::new(random_triple(&mut r, n)),
        ];
        for m in &metrics {
            let s = random_spd(&mut r, n, 0.5, 3.0);
            let x = unit(m.as_ref(), &s, &random_sym(&mut r, n)).scale(0.3);
            let q = random_orthogonal(&mut r, n);
            let a = hamiltonian_geodesic(m.as_ref(), &s, &x, 1.0, &cfg).unwrap();
            let rs = SpdMatrix::new(s.as_sym().congruence(&q)).unwrap();
            let b = hamiltonian_geodesic(m.as_ref(), &rs, &x.congruence(&q), 1.0, &cfg).unwrap();
            assert!(mat_close(b.as_sym(), &a.as_sym().congruence(&q), 1e-8), "{}", m.label());
        }
    }
}

#[test]
fn kernel_forms_integrate_to_classical_geodesics() {
    let mut r = rng(4004);
    let cfg = IntegratorConfig::with_steps(200);
    for (name, id) in [
        ("affine_invariant", MetricId::affine_invariant(1.0, 0.0).unwrap()),
        ("bures_wasserstein", MetricId::bures_wasserstein()),
        ("log_euclidean", MetricId::log_euclidean(1.0, 0.0).unwrap()),
    ] {
        let k = builtin_kernel(name).unwrap();
        let s = random_spd(&mut r, 3, 1.0, 4.0);
        let x = unit(&id, &s, &random_sym(&mut r, 3)).scale(0.5);
        let end = hamiltonian_geodesic(&k, &s, &x, 1.0, &cfg).unwrap();
        assert!(mat_close(end.as_sym(), exp_map(&id, &s, &x, 1.0).unwrap().as_sym(), 1e-8), "{name}");
    }
}

#[test]
fn polar_affine_hamiltonian_matches_closed_form() {
    let mut r = rng(4005);
    let pa = MetricId::polar_affine(1.0, 0.3).unwrap();
    let s = random_spd(&mut r, 3, 1.0, 3.0);
    let x = unit(&pa, &s, &random_sym(&mut r, 3));
    let end = hamiltonian_geodesic(&pa, &s, &x, 1.0, &IntegratorConfig::with_steps(200)).unwrap();
    assert!(mat_close(end.as_sym(), exp_map(&pa, &s, &x, 1.0).unwrap().as_sym(), 1e-6));
}

#[test]
fn transports_are_isometries() {
    let mut r = rng(4006);
    let cfg = IntegratorConfig::default();
    let mut ids = integrable();
    ids.push(MetricId::euclidean(1.0, 0.4).unwrap());
    ids.push(MetricId::polar_affine(0.7, 0.2).unwrap());
    for id in &ids {
        for _ in 0..5 {
            let n = 3;
            let s = random_spd(&mut r, n, 0.5, 3.0);
            let l = random_spd(&mut r, n, 0.5, 3.0);
            let x = random_sym(&mut r, n);
            let before = eval(id, &s, &x, &x).unwrap();
            let v = connection_transport(id, &s, &l, &x, &cfg).unwrap();
            assert!((eval(id, &l, &v, &v).unwrap() - before).abs() <= 1e-7 * before, "{id}");
            if let Ok(closed) = parallel_transport(id, &s, &l, &x) {
                assert!(mat_close(&v, &closed, 1e-7), "{id}");
            }
        }
    }
    let bw = MetricId::bures_wasserstein();
    for _ in 0..10 {
        let (s, l) = (random_spd(&mut r, 4, 0.2, 5.0), random_spd(&mut r, 4, 0.2, 5.0));
        let x = random_sym(&mut r, 4);
        let v = bw_transport_ode(&s, &l, &x, &cfg).unwrap();
        let before = eval(&bw, &s, &x, &x).unwrap();
        assert!((eval(&bw, &l, &v, &v).unwrap() - before).abs() <= 1e-7 * before);
    }
}
