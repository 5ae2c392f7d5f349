use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use spdgeo::classical_metrics::{
    dist, exp_map, log_map, parallel_transport, sectional_curvature, MetricId, MetricKind,
};
use spdgeo::geodesic_engine::{bw_transport_ode, connection_transport, hamiltonian_geodesic, IntegratorConfig};
use spdgeo::invariant_metrics::{duality_defect, validate_triple, MetricTriple, SamplingGrid};
use spdgeo::{Error, SpdMatrix, SymMatrix};

use crate::matrix_io::{format_matrix, format_scalar, read_spd, read_sym, ParseError};
use crate::metric_spec::MetricSpec;

/// A failure with its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError { code: 2, message: e.0 }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidSpec(_) | Error::DimensionMismatch { .. } => 2,
            Error::Unsupported(_) => 4,
            _ => 3,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub struct Output {
    pub text: String,
    pub exit_code: i32,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, exit_code: 0 }
    }
}

pub fn parse_metric(s: &str) -> CliResult<MetricSpec> {
    Ok(s.parse::<MetricSpec>()?)
}

fn load_spd(path: &Path) -> CliResult<Vec<SpdMatrix>> {
    read_spd(path)?
        .into_iter()
        .enumerate()
        .map(|(k, r)| {
            r.map_err(|e| {
                let mut err = CliError::from(e);
                err.message = format!("{}: block {}: {}", path.display(), k + 1, err.message);
                err
            })
        })
        .collect()
}

/// Common length of input lists where single-entry lists are broadcast.
fn batch_len(lens: &[usize]) -> CliResult<usize> {
    let n = lens.iter().copied().max().unwrap_or(0);
    if lens.iter().any(|&l| l != n && l != 1) {
        return Err(CliError {
            code: 2,
            message: format!("input files hold incompatible numbers of matrices {lens:?}"),
        });
    }
    Ok(n)
}

fn pick<T>(v: &[T], k: usize) -> &T {
    if v.len() == 1 {
        &v[0]
    } else {
        &v[k]
    }
}

/// Runs `f` over the batch in parallel, keeping input order.
fn run_batch<F>(len: usize, f: F) -> CliResult<Vec<String>>
where
    F: Fn(usize) -> CliResult<String> + Sync + Send,
{
    (0..len).into_par_iter().map(f).collect()
}

fn matrices(items: Vec<String>) -> Output {
    Output::ok(items.join("\n\n") + "\n")
}

fn scalars(items: Vec<String>) -> Output {
    Output::ok(items.join("\n") + "\n")
}

fn has_closed_exp(spec: &MetricSpec) -> Option<&MetricId> {
    spec.classical().filter(|id| id.kind != MetricKind::Bkm)
}

pub fn cmd_dist(spec: &MetricSpec, a: &Path, b: &Path, precision: usize) -> CliResult<Output> {
    let id = spec.require_classical("dist")?;
    let (a, b) = (load_spd(a)?, load_spd(b)?);
    let len = batch_len(&[a.len(), b.len()])?;
    let out = run_batch(len, |k| Ok(format_scalar(dist(id, pick(&a, k), pick(&b, k))?, precision)))?;
    Ok(scalars(out))
}

pub fn cmd_exp(
    spec: &MetricSpec,
    sigma: &Path,
    x: &Path,
    t: f64,
    steps: usize,
    precision: usize,
) -> CliResult<Output> {
    let (s, x) = (load_spd(sigma)?, read_sym(x)?);
    let len = batch_len(&[s.len(), x.len()])?;
    let cfg = IntegratorConfig::with_steps(steps);
    let out = run_batch(len, |k| {
        let (s, x) = (pick(&s, k), pick(&x, k));
        let end = match has_closed_exp(spec) {
            Some(id) => exp_map(id, s, x, t)?,
            None => hamiltonian_geodesic(spec.metric(s.n())?.as_ref(), s, x, t, &cfg)?,
        };
        Ok(format_matrix(end.as_matrix(), precision))
    })?;
    Ok(matrices(out))
}

pub fn cmd_log(spec: &MetricSpec, sigma: &Path, lambda: &Path, precision: usize) -> CliResult<Output> {
    let id = spec.require_classical("log")?;
    let (s, l) = (load_spd(sigma)?, load_spd(lambda)?);
    let len = batch_len(&[s.len(), l.len()])?;
    let out = run_batch(len, |k| Ok(format_matrix(log_map(id, pick(&s, k), pick(&l, k))?.as_matrix(), precision)))?;
    Ok(matrices(out))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum TransportMode {
    /// Closed-form transport.
    Closed,
    /// Numerical integration of the transport equation.
    Ode,
}

pub fn cmd_transport(
    spec: &MetricSpec,
    paths: [&Path; 3],
    mode: TransportMode,
    steps: usize,
    precision: usize,
) -> CliResult<Output> {
    let id = spec.require_classical("transport")?;
    let (s, l, x) = (load_spd(paths[0])?, load_spd(paths[1])?, read_sym(paths[2])?);
    let len = batch_len(&[s.len(), l.len(), x.len()])?;
    let cfg = IntegratorConfig::with_steps(steps);
    let out = run_batch(len, |k| {
        let (s, l, x) = (pick(&s, k), pick(&l, k), pick(&x, k));
        let v = match (mode, id.kind) {
            (TransportMode::Closed, _) => parallel_transport(id, s, l, x)?,
            (TransportMode::Ode, MetricKind::BuresWasserstein) => bw_transport_ode(s, l, x, &cfg)?,
            (TransportMode::Ode, _) => connection_transport(id, s, l, x, &cfg)?,
        };
        Ok(format_matrix(v.as_matrix(), precision))
    })?;
    Ok(matrices(out))
}

pub fn cmd_curvature(spec: &MetricSpec, paths: [&Path; 3], precision: usize) -> CliResult<Output> {
    let id = spec.require_classical("curvature")?;
    let (s, x, y) = (load_spd(paths[0])?, read_sym(paths[1])?, read_sym(paths[2])?);
    let len = batch_len(&[s.len(), x.len(), y.len()])?;
    let out = run_batch(len, |k| {
        Ok(format_scalar(sectional_curvature(id, pick(&s, k), pick(&x, k), pick(&y, k))?, precision))
    })?;
    Ok(scalars(out))
}

/// Seed for randomized sampling, from `SPDGEO_SEED` when set.
pub fn sampling_seed() -> CliResult<u64> {
    match std::env::var("SPDGEO_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| CliError {
            code: 2,
            message: format!("SPDGEO_SEED must be an unsigned integer, got '{v}'"),
        }),
        Err(_) => Ok(SamplingGrid::default().seed),
    }
}

pub fn cmd_validate(spec: &MetricSpec, n: usize, points: Option<usize>) -> CliResult<Output> {
    if n == 0 {
        return Err(CliError {
            code: 2,
            message: "dimension must be at least 1".into(),
        });
    }
    let mut grid = SamplingGrid::with_seed(sampling_seed()?);
    if let Some(p) = points {
        grid.random_points = p;
    }
    let triple = MetricTriple::from_metric(n, spec.metric(n)?);
    let report = validate_triple(&triple, &grid);
    Ok(Output {
        text: report.to_string(),
        exit_code: if report.all_pass() { 0 } else { 1 },
    })
}

pub fn cmd_cometric_check(spec: &MetricSpec, sigma: &Path, precision: usize) -> CliResult<Output> {
    let s = load_spd(sigma)?;
    let out = run_batch(s.len(), |k| {
        let m = spec.metric(s[k].n())?;
        Ok(format!("{:.precision$e}", duality_defect(m.as_ref(), &s[k])?))
    })?;
    Ok(scalars(out))
}

pub fn cmd_bench(
    spec: &MetricSpec,
    sigma: &Path,
    x: &Path,
    t: f64,
    step_list: &[usize],
    precision: usize,
) -> CliResult<Output> {
    let (s, x) = (load_spd(sigma)?, read_sym(x)?);
    let len = batch_len(&[s.len(), x.len()])?;
    // sequential: the timings should not compete for cores
    let mut tables = Vec::with_capacity(len);
    for k in 0..len {
        let (s, x): (&SpdMatrix, &SymMatrix) = (pick(&s, k), pick(&x, k));
        let metric = spec.metric(s.n())?;
        let exact = match has_closed_exp(spec) {
            Some(id) => Some(exp_map(id, s, x, t)?),
            None => None,
        };
        let mut rows = vec!["steps error seconds".to_string()];
        for &steps in step_list {
            let start = Instant::now();
            let end = hamiltonian_geodesic(metric.as_ref(), s, x, t, &IntegratorConfig::with_steps(steps))?;
            let secs = start.elapsed().as_secs_f64();
            let err = match &exact {
                Some(e) => format!(
                    "{:.precision$e}",
                    (end.as_matrix() - e.as_matrix()).norm() / e.as_matrix().norm()
                ),
                None => "n/a".to_string(),
            };
            rows.push(format!("{steps} {err} {secs:.6}"));
        }
        tables.push(rows.join("\n"));
    }
    Ok(matrices(tables))
}
