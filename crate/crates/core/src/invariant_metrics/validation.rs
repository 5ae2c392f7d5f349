use std::fmt;

use super::{arrange_pair, MetricTriple};
use crate::sampling::{log_uniform, rng};
use crate::symlin::{eigh, SymMatrix};

/// Relative tolerance of the compatibility condition `γ = α + β` on `d₁ = d₂`.
pub const COMPAT_TOL: f64 = 1e-9;
/// Relative tolerance of the permutation symmetry checks.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Sample points of `(0, ∞)ⁿ` used to check the triple conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplingGrid {
    /// Values of the tensor grid, used when `n ≤ tensor_max_n`.
    pub tensor_values: Vec<f64>,
    pub tensor_max_n: usize,
    /// Number of log-uniform random points in `[lo, hi]ⁿ`.
    pub random_points: usize,
    pub lo: f64,
    pub hi: f64,
    pub seed: u64,
}

impl Default for SamplingGrid {
    fn default() -> Self {
        Self {
            tensor_values: vec![0.1, 0.5, 1.0, 2.0, 10.0],
            tensor_max_n: 4,
            random_points: 200,
            lo: 1e-2,
            hi: 1e2,
            seed: 0x5eed,
        }
    }
}

impl SamplingGrid {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    /// Scalar probe points for one-variable checks.
    pub fn probe_values() -> Vec<f64> {
        (-8..=8).map(|k| 10f64.powf(k as f64 / 4.0)).collect()
    }

    /// Tensor grid, random points, and for every random point the copies with
    /// `d₂ := d₁` and with a repeated tail entry.
    pub fn points(&self, n: usize) -> Vec<Vec<f64>> {
        let mut pts = Vec::new();
        if n <= self.tensor_max_n && !self.tensor_values.is_empty() {
            let m = self.tensor_values.len();
            let total = m.pow(n as u32);
            for mut k in 0..total {
                let mut p = Vec::with_capacity(n);
                for _ in 0..n {
                    p.push(self.tensor_values[k % m]);
                    k /= m;
                }
                pts.push(p);
            }
        }
        let mut r = rng(self.seed);
        for _ in 0..self.random_points {
            let p: Vec<f64> = (0..n).map(|_| log_uniform(&mut r, self.lo, self.hi)).collect();
            if n >= 2 {
                let mut q = p.clone();
                q[1] = q[0];
                pts.push(q);
            }
            if n >= 4 {
                let mut q = p.clone();
                q[3] = q[2];
                pts.push(q);
            }
            pts.push(p);
        }
        pts
    }
}

/// Outcome of one condition.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionResult {
    pub name: &'static str,
    pub pass: bool,
    pub worst_sample: Vec<f64>,
    /// Compatibility: largest `|γ − α − β|`; positivity: smallest eigenvalue
    /// of the form; symmetry: largest relative deviation.
    pub magnitude: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub conditions: Vec<ConditionResult>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.conditions.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&ConditionResult> {
        self.conditions.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.conditions {
            let sample: Vec<String> = c.worst_sample.iter().map(|x| format!("{x:.6e}")).collect();
            writeln!(
                f,
                "{} {} worst=[{}] magnitude={:.6e}",
                c.name,
                if c.pass { "PASS" } else { "FAIL" },
                sample.join(","),
                c.magnitude
            )?;
        }
        Ok(())
    }
}

fn nan_as_inf(x: f64) -> f64 {
    if x.is_nan() {
        f64::INFINITY
    } else {
        x
    }
}

/// Checks compatibility, positivity and symmetry of `t` on the grid points.
pub fn validate_triple(t: &MetricTriple, grid: &SamplingGrid) -> ValidationReport {
    let n = t.n;
    let pts = grid.points(n);

    // compatibility on d₁ = d₂
    let mut compat = ConditionResult {
        name: "compatibility",
        pass: true,
        worst_sample: Vec::new(),
        magnitude: 0.0,
    };
    let mut worst_rel = 0.0;
    if n >= 2 {
        for d in pts.iter().filter(|d| d[0] == d[1]) {
            let (a, b, g) = (t.alpha_at(d), t.beta_at(d), t.gamma_at(d));
            let diff = nan_as_inf((g - a - b).abs());
            let r = diff / g.abs().max(a.abs() + b.abs()).max(f64::MIN_POSITIVE);
            if r > worst_rel || compat.worst_sample.is_empty() {
                worst_rel = nan_as_inf(r).max(worst_rel);
                compat.magnitude = diff;
                compat.worst_sample = d.clone();
            }
        }
        compat.pass = worst_rel <= COMPAT_TOL;
    }

    // positivity of S(d) and of α
    let mut pos = ConditionResult {
        name: "positivity",
        pass: true,
        worst_sample: Vec::new(),
        magnitude: f64::INFINITY,
    };
    for d in &pts {
        let s = t.s_matrix(d);
        let mut m = if s.iter().all(|x| x.is_finite()) {
            eigh(&SymMatrix::new(s)).map(|e| e.d[0]).unwrap_or(f64::NEG_INFINITY)
        } else {
            f64::NEG_INFINITY
        };
        for i in 0..n {
            for j in i + 1..n {
                let a = t.alpha_at(&arrange_pair(d, i, j));
                m = m.min(if a.is_nan() { f64::NEG_INFINITY } else { a });
            }
        }
        if m < pos.magnitude || pos.worst_sample.is_empty() {
            pos.magnitude = m.min(pos.magnitude);
            pos.worst_sample = d.clone();
        }
    }
    pos.pass = pos.magnitude > 0.0;

    // permutation symmetry
    let mut sym = ConditionResult {
        name: "symmetry",
        pass: true,
        worst_sample: Vec::new(),
        magnitude: 0.0,
    };
    let rel = |a: f64, b: f64, scale: f64| nan_as_inf((a - b).abs() / scale.max(f64::MIN_POSITIVE));
    for d in &pts {
        let mut dev: f64 = 0.0;
        let g = t.gamma_at(d);
        if n >= 2 {
            let a = t.alpha_at(d);
            let b = t.beta_at(d);
            for p in permutations(n) {
                let pd: Vec<f64> = p.iter().map(|&k| d[k]).collect();
                dev = dev.max(rel(t.alpha_at(&pd), a, a.abs()));
                dev = dev.max(rel(t.beta_at(&pd), b, a.abs() + b.abs()));
            }
        }
        for p in tail_permutations(n, 1) {
            let pd: Vec<f64> = p.iter().map(|&k| d[k]).collect();
            dev = dev.max(rel(t.gamma_at(&pd), g, g.abs()));
        }
        if dev > sym.magnitude || sym.worst_sample.is_empty() {
            sym.magnitude = dev.max(sym.magnitude);
            sym.worst_sample = d.clone();
        }
    }
    sym.pass = sym.magnitude <= SYMMETRY_TOL;

    ValidationReport {
        conditions: vec![compat, pos, sym],
    }
}

/// Index permutations preserving the (2, n−2) structure: swap of the first
/// pair, reversal and rotation of the tail, and both combined.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n < 2 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for tail in tail_permutations(n, 2).into_iter().chain(std::iter::once((0..n).collect())) {
        let mut swapped = tail.clone();
        swapped.swap(0, 1);
        out.push(swapped);
        out.push(tail);
    }
    out
}

/// Permutations that fix the first `head` indices and move the rest.
fn tail_permutations(n: usize, head: usize) -> Vec<Vec<usize>> {
    if n <= head + 1 {
        return Vec::new();
    }
    let base: Vec<usize> = (0..n).collect();
    let mut rev = base.clone();
    rev[head..].reverse();
    let mut rot = base.clone();
    rot[head..].rotate_left(1);
    vec![rev, rot]
}
