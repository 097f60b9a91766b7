//! Non-stationary sampling.
//!
//! The attachment choices made by arrivals `t, t+1, ..., t+C-1` are treated as
//! approximately iid draws from the time-`t` conditional law. Choices landing
//! on vertices that did not exist before `t` are dropped, so the resulting
//! empirical measure lives on `{1, ..., t-1}` like `p_{t,·}`.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::models::{ProbVector, Trajectory};

/// Sorted probe times sharing one window width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbePlan {
    points: Vec<usize>,
    width: usize,
}

impl ProbePlan {
    /// Validates that every window `[r, r + width)` fits inside arrivals `2..=n`.
    pub fn new(mut points: Vec<usize>, width: usize, n: usize) -> Result<Self> {
        if width == 0 {
            return Err(Error::InvalidConfig("sample width must be at least 1".into()));
        }
        if points.is_empty() {
            return Err(Error::InvalidConfig("probe plan needs at least one point".into()));
        }
        points.sort_unstable();
        if let Some(&bad) = points.iter().find(|&&r| r < 2 || r + width > n + 1) {
            return Err(Error::WindowExceedsHorizon { t: bad, width, n });
        }
        Ok(ProbePlan { points, width })
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn count(&self) -> usize {
        self.points.len()
    }

    /// Whether every window fits in a trajectory of `n` vertices.
    pub fn fits(&self, n: usize) -> bool {
        self.points.last().is_some_and(|&r| r + self.width <= n + 1)
    }
}

/// Draws `count` probe times uniformly with replacement from `{2, ..., n + 1 - width}`.
pub fn sample_probe_points<R: Rng + ?Sized>(
    n: usize,
    count: usize,
    width: usize,
    rng: &mut R,
) -> Result<ProbePlan> {
    if width == 0 || n < width + 2 {
        return Err(Error::WindowExceedsHorizon { t: 2, width, n });
    }
    if count == 0 {
        return Err(Error::InvalidConfig("probe count must be at least 1".into()));
    }
    let hi = n + 1 - width;
    let points = (0..count).map(|_| rng.gen_range(2..=hi)).collect();
    ProbePlan::new(points, width, n)
}

/// Windowed empirical attachment measure at probe time `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalMeasure {
    pub t: usize,
    pub width: usize,
    /// Hit counts keyed by vertex id in `1..t`.
    pub counts: BTreeMap<usize, u64>,
    /// Number of in-window edge choices landing in `1..t`.
    pub denom: u64,
}

impl EmpiricalMeasure {
    pub fn mu(&self, v: usize) -> f64 {
        if self.denom == 0 {
            return 0.0;
        }
        self.counts.get(&v).map_or(0.0, |&c| c as f64 / self.denom as f64)
    }

    /// Dense vector over `1..t` (all zeros when `denom == 0`).
    pub fn densify(&self) -> Vec<f64> {
        (1..self.t).map(|v| self.mu(v)).collect()
    }
}

/// Counts edge choices of arrivals `h in [t, t + width)` that land in `1..t`.
pub fn empirical_measure(traj: &Trajectory, t: usize, width: usize) -> Result<EmpiricalMeasure> {
    if t < 2 || width == 0 || t + width > traj.n() + 1 {
        return Err(Error::WindowExceedsHorizon {
            t,
            width,
            n: traj.n(),
        });
    }
    let mut counts = BTreeMap::new();
    let mut denom = 0;
    for h in t..t + width {
        for &v in traj.targets(h) {
            let v = v as usize;
            if v < t {
                *counts.entry(v).or_insert(0) += 1;
                denom += 1;
            }
        }
    }
    Ok(EmpiricalMeasure {
        t,
        width,
        counts,
        denom,
    })
}

/// Total variation between an empirical measure and a model's conditional law.
///
/// Only the support of the empirical measure is visited:
/// `TV = ½ [Σ_{v ∈ supp} (|μ̂(v) − p(v)| − p(v)) + 1]`. An empty window
/// (`denom == 0`) is maximally distant.
pub fn tv_distance(emp: &EmpiricalMeasure, model_probs: &ProbVector) -> Result<f64> {
    if emp.t != model_probs.t {
        return Err(Error::TimeMismatch {
            empirical: emp.t,
            model: model_probs.t,
        });
    }
    if emp.denom == 0 {
        return Ok(1.0);
    }
    let denom = emp.denom as f64;
    let on_support: f64 = emp
        .counts
        .iter()
        .map(|(&v, &c)| {
            let p = model_probs.prob(v);
            (c as f64 / denom - p).abs() - p
        })
        .sum();
    Ok((0.5 * (on_support + 1.0)).clamp(0.0, 1.0))
}

/// `½ Σ |p_v − q_v|` over a common finite domain.
pub fn tv_dense(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    let sum: f64 = p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum();
    Ok((0.5 * sum).clamp(0.0, 1.0))
}

const KEY_SCALE: f64 = 1e15;

/// Multiplicities `N(p, q)`: how many domain elements get mass `p` under the
/// first measure and `q` under the second.
///
/// Pairs are keyed by their values quantised to `1e-15`; each entry keeps the
/// first exact value pair seen for its key.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CountingFunction {
    entries: BTreeMap<(i64, i64), CountingEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountingEntry {
    pub p: f64,
    pub q: f64,
    pub count: u64,
}

impl CountingFunction {
    pub fn insert(&mut self, p: f64, q: f64) {
        let key = ((p * KEY_SCALE).round() as i64, (q * KEY_SCALE).round() as i64);
        self.entries
            .entry(key)
            .or_insert(CountingEntry { p, q, count: 0 })
            .count += 1;
    }

    pub fn entries(&self) -> impl Iterator<Item = &CountingEntry> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `N(p, q)` for an exact value pair (0 if absent).
    pub fn get(&self, p: f64, q: f64) -> u64 {
        let key = ((p * KEY_SCALE).round() as i64, (q * KEY_SCALE).round() as i64);
        self.entries.get(&key).map_or(0, |e| e.count)
    }

    /// Total multiplicity, i.e. the domain size.
    pub fn domain_size(&self) -> u64 {
        self.entries.values().map(|e| e.count).sum()
    }

    /// Builds `N_t(p, q)` with `p` from an empirical measure and `q` from a model.
    pub fn from_empirical(emp: &EmpiricalMeasure, q: &ProbVector) -> Result<Self> {
        if emp.t != q.t {
            return Err(Error::TimeMismatch {
                empirical: emp.t,
                model: q.t,
            });
        }
        counting_function(&emp.densify(), q)
    }
}

/// Pairs `p` and `q` element by element into a [`CountingFunction`].
pub fn counting_function(p: &[f64], q: &[f64]) -> Result<CountingFunction> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    let mut cf = CountingFunction::default();
    for (&a, &b) in p.iter().zip(q) {
        cf.insert(a, b);
    }
    Ok(cf)
}

/// `½ Σ_{(p,q)} N(p, q) |p − q|`, the discrete double-integral form of TV.
pub fn tv_via_counting(cf: &CountingFunction) -> f64 {
    let sum: f64 = cf.entries().map(|e| e.count as f64 * (e.p - e.q).abs()).sum();
    (0.5 * sum).clamp(0.0, 1.0)
}
