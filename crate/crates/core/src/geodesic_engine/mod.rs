//! Numerical geodesics and parallel transport.
//!
//! [`hamiltonian_trajectory`] integrates `ẋ = G*(x) p`, `ṗ = −½ ∂ₓ(pᵀG*(x)p)`
//! in the coordinates of the orthonormal basis `{Eᵢᵢ, Eᵢⱼ}`; only the
//! cometric is needed. [`connection_transport`] and [`bw_transport_ode`]
//! solve the parallel transport equations along closed-form geodesics.

use nalgebra::{DMatrix, DVector};

use crate::classical_metrics::{connection, exp_map, geodesic_velocity, log_map, MetricId, MetricKind};
use crate::error::{Error, Result};
use crate::invariant_metrics::{co_eval, gram, InvariantMetric};
use crate::symlin::{from_coords, sylvester_lift, to_coords, SpdMatrix, SymMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    Rk4,
    Midpoint,
}

/// Finite-difference stencil for `∂H/∂x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FdStencil {
    /// `(H(x + h) − H(x − h)) / 2h`.
    Central2,
    /// `(−H(x + 2h) + 8H(x + h) − 8H(x − h) + H(x − 2h)) / 12h`.
    Central4,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub steps: usize,
    pub scheme: Scheme,
    /// Step of the finite differences, relative to the smallest eigenvalue
    /// of `Σ`.
    pub fd_step: f64,
    pub stencil: FdStencil,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            steps: 100,
            scheme: Scheme::Rk4,
            fd_step: 1e-3,
            stencil: FdStencil::Central4,
        }
    }
}

impl IntegratorConfig {
    pub fn with_steps(steps: usize) -> Self {
        Self {
            steps,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::InvalidSpec("integrator needs at least one step".into()));
        }
        if !(self.fd_step > 0.0) {
            return Err(Error::InvalidSpec(format!("fd_step must be positive, got {}", self.fd_step)));
        }
        Ok(())
    }
}

/// Position and momentum coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianState {
    pub x: DVector<f64>,
    pub p: DVector<f64>,
}

impl HamiltonianState {
    pub fn n(&self) -> usize {
        // dim Sym(n) = n(n + 1)/2
        ((((8 * self.x.len() + 1) as f64).sqrt() as usize) - 1) / 2
    }

    pub fn sigma(&self) -> Result<SpdMatrix> {
        SpdMatrix::new(from_coords(self.n(), &self.x))
    }

    /// Momentum as a symmetric matrix under the Frobenius pairing.
    pub fn covector(&self) -> SymMatrix {
        from_coords(self.n(), &self.p)
    }
}

/// Sampled geodesic: `points[k]` at `times[k]`, with momenta and the
/// Hamiltonian `½g*(p, p)` at each sample.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<SpdMatrix>,
    pub momenta: Vec<DVector<f64>>,
    pub energies: Vec<f64>,
}

impl Trajectory {
    pub fn endpoint(&self) -> &SpdMatrix {
        self.points.last().expect("trajectory has at least one point")
    }

    /// `max |H(t) − H(0)|`.
    pub fn energy_drift(&self) -> f64 {
        let h0 = self.energies[0];
        self.energies.iter().fold(0.0, |m, h| m.max((h - h0).abs()))
    }
}

/// Flat map: coordinates of `g_Σ(X, ·)` in the dual basis.
pub fn momentum_from_velocity<M: InvariantMetric + ?Sized>(
    metric: &M,
    sigma: &SpdMatrix,
    x: &SymMatrix,
) -> Result<DVector<f64>> {
    sigma.check_dim(x)?;
    Ok(gram(metric, sigma)? * to_coords(x))
}

/// Sharp map: the vector `X` with `g_Σ(X, ·) = p`.
pub fn velocity_from_momentum<M: InvariantMetric + ?Sized>(
    metric: &M,
    sigma: &SpdMatrix,
    p: &DVector<f64>,
) -> Result<SymMatrix> {
    let w = from_coords(sigma.n(), p);
    let e = sigma.eig();
    let form = metric.co_eigen_form(sigma.eigenvalues())?;
    // g*(W, ·) in the eigenbasis: αᵢⱼ* W'ᵢⱼ off the diagonal, S* W'diag on it
    let wp = e.to_eigenbasis(&w);
    let n = sigma.n();
    let diag = DVector::from_fn(n, |i, _| wp[(i, i)]);
    let sd = &form.s * diag;
    let m = DMatrix::from_fn(n, n, |i, j| if i == j { sd[i] } else { form.alpha[(i, j)] * wp[(i, j)] });
    Ok(e.from_eigenbasis(&m))
}

fn hamiltonian<M: InvariantMetric + ?Sized>(metric: &M, n: usize, x: &DVector<f64>, p: &DVector<f64>) -> Result<f64> {
    let sigma = SpdMatrix::new(from_coords(n, x))?;
    let w = from_coords(n, p);
    Ok(0.5 * co_eval(metric, &sigma, &w, &w)?)
}

struct Flow<'a, M: ?Sized> {
    metric: &'a M,
    n: usize,
    cfg: IntegratorConfig,
}

impl<M: InvariantMetric + ?Sized> Flow<'_, M> {
    fn rhs(&self, x: &DVector<f64>, p: &DVector<f64>) -> Result<(DVector<f64>, DVector<f64>)> {
        let sigma = SpdMatrix::new(from_coords(self.n, x))?;
        let xdot = to_coords(&velocity_from_momentum(self.metric, &sigma, p)?);
        let h = self.cfg.fd_step * sigma.eigenvalues()[0];
        let mut pdot = DVector::zeros(x.len());
        for l in 0..x.len() {
            let at = |s: f64| {
                let mut y = x.clone();
                y[l] += s * h;
                hamiltonian(self.metric, self.n, &y, p)
            };
            let dh = match self.cfg.stencil {
                FdStencil::Central2 => (at(1.0)? - at(-1.0)?) / (2.0 * h),
                FdStencil::Central4 => (-at(2.0)? + 8.0 * at(1.0)? - 8.0 * at(-1.0)? + at(-2.0)?) / (12.0 * h),
            };
            pdot[l] = -dh;
        }
        Ok((xdot, pdot))
    }

    fn step(&self, x: &DVector<f64>, p: &DVector<f64>, dt: f64) -> Result<(DVector<f64>, DVector<f64>)> {
        match self.cfg.scheme {
            Scheme::Rk4 => {
                let (k1x, k1p) = self.rhs(x, p)?;
                let (k2x, k2p) = self.rhs(&(x + &k1x * (dt / 2.0)), &(p + &k1p * (dt / 2.0)))?;
                let (k3x, k3p) = self.rhs(&(x + &k2x * (dt / 2.0)), &(p + &k2p * (dt / 2.0)))?;
                let (k4x, k4p) = self.rhs(&(x + &k3x * dt), &(p + &k3p * dt))?;
                Ok((
                    x + (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (dt / 6.0),
                    p + (k1p + k2p * 2.0 + k3p * 2.0 + k4p) * (dt / 6.0),
                ))
            }
            Scheme::Midpoint => {
                let (k1x, k1p) = self.rhs(x, p)?;
                let (k2x, k2p) = self.rhs(&(x + &k1x * (dt / 2.0)), &(p + &k1p * (dt / 2.0)))?;
                Ok((x + k2x * dt, p + k2p * dt))
            }
        }
    }
}

/// Integrates the Hamiltonian flow from `(Σ, X♭)` up to time `t_final`
/// (which may be negative) in `cfg.steps` fixed steps.
pub fn hamiltonian_trajectory<M: InvariantMetric + ?Sized>(
    metric: &M,
    sigma: &SpdMatrix,
    x: &SymMatrix,
    t_final: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    let p0 = momentum_from_velocity(metric, sigma, x)?;
    hamiltonian_from_state(
        metric,
        &HamiltonianState {
            x: to_coords(sigma.as_sym()),
            p: p0,
        },
        t_final,
        cfg,
    )
}

/// Same as [`hamiltonian_trajectory`], starting from explicit coordinates.
pub fn hamiltonian_from_state<M: InvariantMetric + ?Sized>(
    metric: &M,
    start: &HamiltonianState,
    t_final: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    let n = start.n();
    let flow = Flow { metric, n, cfg: *cfg };
    let dt = t_final / cfg.steps as f64;
    let (mut x, mut p) = (start.x.clone(), start.p.clone());
    let mut traj = Trajectory {
        times: vec![0.0],
        points: vec![start.sigma()?],
        momenta: vec![p.clone()],
        energies: vec![hamiltonian(metric, n, &x, &p)?],
    };
    for k in 0..cfg.steps {
        let last_t = k as f64 * dt;
        let boundary = |e: Error| match e {
            Error::NotPositiveDefinite { .. } => Error::BoundaryHit { last_t },
            other => other,
        };
        let (nx, np) = flow.step(&x, &p, dt).map_err(boundary)?;
        let point = SpdMatrix::new(from_coords(n, &nx)).map_err(boundary)?;
        x = nx;
        p = np;
        traj.times.push((k + 1) as f64 * dt);
        traj.points.push(point);
        traj.energies.push(hamiltonian(metric, n, &x, &p)?);
        traj.momenta.push(p.clone());
    }
    Ok(traj)
}

/// Endpoint of [`hamiltonian_trajectory`].
pub fn hamiltonian_geodesic<M: InvariantMetric + ?Sized>(
    metric: &M,
    sigma: &SpdMatrix,
    x: &SymMatrix,
    t_final: f64,
    cfg: &IntegratorConfig,
) -> Result<SpdMatrix> {
    Ok(hamiltonian_trajectory(metric, sigma, x, t_final, cfg)?.endpoint().clone())
}

fn rk4_matrix(
    y0: &SymMatrix,
    steps: usize,
    f: impl Fn(f64, &SymMatrix) -> Result<SymMatrix>,
) -> Result<SymMatrix> {
    let dt = 1.0 / steps as f64;
    let mut y = y0.clone();
    for k in 0..steps {
        let t = k as f64 * dt;
        let k1 = f(t, &y)?;
        let k2 = f(t + dt / 2.0, &(&y + &k1.scale(dt / 2.0)))?;
        let k3 = f(t + dt / 2.0, &(&y + &k2.scale(dt / 2.0)))?;
        let k4 = f(t + dt, &(&y + &k3.scale(dt)))?;
        y = &y + &(k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(dt / 6.0);
    }
    Ok(y)
}

/// Parallel transport of `X` along the closed-form geodesic from `Σ` to `Λ`,
/// solving `V̇ = −Γ_γ(γ̇, V)` with rk4.
pub fn connection_transport(
    id: &MetricId,
    sigma: &SpdMatrix,
    lambda: &SpdMatrix,
    x: &SymMatrix,
    cfg: &IntegratorConfig,
) -> Result<SymMatrix> {
    cfg.validate()?;
    if id.kind == MetricKind::Bkm {
        return Err(Error::Unsupported("geodesics of the BKM metric are not known in closed form".into()));
    }
    sigma.check_dim(x)?;
    let v = log_map(id, sigma, lambda)?;
    let zero = SymMatrix::zeros(sigma.n());
    rk4_matrix(x, cfg.steps, |t, y| {
        let g = exp_map(id, sigma, &v, t)?;
        let gd = geodesic_velocity(id, sigma, &v, t)?;
        Ok(-connection(id, &g, &gd, y, &zero)?)
    })
}

/// Bures-Wasserstein parallel transport from `Σ` to `Λ` for any pair.
///
/// With `γʰ(t) = (1 − t)Σ^{1/2} + tΣ^{-1/2}(Σ^{1/2}ΛΣ^{1/2})^{1/2}` and
/// `γ = γʰγʰᵀ`, the lift `X⁰(t)` solves
/// `γẊ⁰ + Ẋ⁰γ = −(γʰγ̇ʰᵀX⁰ + X⁰γ̇ʰγʰᵀ)`; the result is `ΛX⁰(1) + X⁰(1)Λ`.
pub fn bw_transport_ode(
    sigma: &SpdMatrix,
    lambda: &SpdMatrix,
    x: &SymMatrix,
    cfg: &IntegratorConfig,
) -> Result<SymMatrix> {
    cfg.validate()?;
    sigma.check_dim(x)?;
    lambda.check_dim(x)?;
    let (sh, sih) = (sigma.sqrt(), sigma.inv_sqrt());
    let mid = SpdMatrix::new(lambda.as_sym().congruence(sh.as_matrix()))?.sqrt();
    let end = sih.as_matrix() * mid.as_matrix();
    let hdot = &end - sh.as_matrix();
    let gh = |t: f64| sh.as_matrix() * (1.0 - t) + &end * t;
    let x0 = sylvester_lift(sigma, x);
    let x1 = rk4_matrix(&x0, cfg.steps, |t, y| {
        let a = gh(t);
        let gamma = SpdMatrix::from_matrix(&a * a.transpose())?;
        let m = &a * hdot.transpose() * y.as_matrix();
        let rhs = SymMatrix::new(&m + m.transpose());
        Ok(-sylvester_lift(&gamma, &rhs))
    })?;
    Ok(lambda.as_sym().anticommutator(&x1))
}

#[cfg(test)]
mod tests;
