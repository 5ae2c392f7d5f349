use std::sync::Arc;

use spdgeo::classical_metrics::MetricId;
use spdgeo::invariant_metrics::InvariantMetric;
use spdgeo::kernel_family::{builtin_kernel, BostSpec, KernelSpec, Mean, MeanKernelSpec, SeparableSpec};
use spdgeo::{Error, Result};

/// A metric named on the command line.
///
/// Grammar, `kind[:key=val,...]`:
///
/// | string | metric |
/// |---|---|
/// | `e`, `le`, `ai`, `pa` with `alpha`, `beta` | classical two-parameter families |
/// | `bw`, `bkm` | Bures-Wasserstein, BKM |
/// | `kernel:NAME` | builtin kernel metric |
/// | `kernel:mean=M,theta=T,a=A` | mean kernel `a·m(x, y)^θ` |
/// | `bost:kernel=NAME,alpha=A,beta=B` | kernel metric with trace term |
/// | `separable:kernel=NAME,alpha=A,beta=B` | separable form of the above |
#[derive(Clone, Debug)]
pub enum MetricSpec {
    Classical(MetricId),
    Kernel(KernelSpec),
    Bost { kernel: KernelSpec, alpha: f64, beta: f64 },
    Separable { kernel: KernelSpec, alpha: f64, beta: f64 },
}

fn key_values(rest: &str) -> Result<Vec<(&str, &str)>> {
    rest.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::InvalidSpec(format!("expected key=value, got '{p}'")))
        })
        .collect()
}

fn number(key: &str, v: &str) -> Result<f64> {
    v.parse()
        .map_err(|_| Error::InvalidSpec(format!("{key} must be a number, got '{v}'")))
}

fn parse_kernel(rest: &str) -> Result<KernelSpec> {
    if !rest.contains('=') {
        return builtin_kernel(rest.trim());
    }
    let (mut mean, mut theta, mut a) = (None, None, 1.0);
    for (k, v) in key_values(rest)? {
        match k {
            "mean" => mean = Some(Mean::parse(v)?),
            "theta" => theta = Some(number(k, v)?),
            "a" => a = number(k, v)?,
            _ => return Err(Error::InvalidSpec(format!("unknown kernel key '{k}'"))),
        }
    }
    let mean = mean.ok_or_else(|| Error::InvalidSpec("mean kernel needs mean=...".into()))?;
    let theta = theta.ok_or_else(|| Error::InvalidSpec("mean kernel needs theta=...".into()))?;
    Ok(MeanKernelSpec::new(mean, theta, a)?.kernel())
}

fn parse_trace_extended(rest: &str) -> Result<(KernelSpec, f64, f64)> {
    let (mut kernel, mut alpha, mut beta) = (None, 1.0, 0.0);
    for (k, v) in key_values(rest)? {
        match k {
            "kernel" => kernel = Some(builtin_kernel(v)?),
            "alpha" => alpha = number(k, v)?,
            "beta" => beta = number(k, v)?,
            _ => return Err(Error::InvalidSpec(format!("unknown key '{k}'"))),
        }
    }
    let kernel = kernel.ok_or_else(|| Error::InvalidSpec("missing kernel=NAME".into()))?;
    // factors are checked again in the real dimension
    BostSpec::new(kernel.clone(), alpha, beta, 1)?;
    Ok((kernel, alpha, beta))
}

impl std::str::FromStr for MetricSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, rest) = s.split_once(':').unwrap_or((s, ""));
        match head.trim() {
            "kernel" => Ok(MetricSpec::Kernel(parse_kernel(rest)?)),
            "bost" => {
                let (kernel, alpha, beta) = parse_trace_extended(rest)?;
                Ok(MetricSpec::Bost { kernel, alpha, beta })
            }
            "separable" => {
                let (kernel, alpha, beta) = parse_trace_extended(rest)?;
                Ok(MetricSpec::Separable { kernel, alpha, beta })
            }
            _ => Ok(MetricSpec::Classical(s.parse()?)),
        }
    }
}

impl MetricSpec {
    pub fn classical(&self) -> Option<&MetricId> {
        match self {
            MetricSpec::Classical(id) => Some(id),
            _ => None,
        }
    }

    /// The metric as a generic invariant metric on `n × n` matrices.
    pub fn metric(&self, n: usize) -> Result<Arc<dyn InvariantMetric>> {
        Ok(match self {
            MetricSpec::Classical(id) => {
                id.params(n)?;
                Arc::new(*id)
            }
            MetricSpec::Kernel(k) => Arc::new(k.clone()),
            MetricSpec::Bost { kernel, alpha, beta } => Arc::new(BostSpec::new(kernel.clone(), *alpha, *beta, n)?),
            MetricSpec::Separable { kernel, alpha, beta } => {
                Arc::new(SeparableSpec::from_bost(&BostSpec::new(kernel.clone(), *alpha, *beta, n)?))
            }
        })
    }

    pub fn require_classical(&self, what: &str) -> Result<&MetricId> {
        self.classical()
            .ok_or_else(|| Error::Unsupported(format!("{what} is only available for the classical metrics")))
    }
}
