//! Growth models, degree state and trajectories.
//!
//! A growing graph starts at time 1 as vertex 1 carrying `m` self-loops
//! (degree `2m`). At each arrival time `t = 2..=n` vertex `t` attaches `m`
//! edges to earlier vertices; the `m` targets are drawn independently from the
//! model's conditional distribution given `G_{t-1}`. Every model here depends
//! on `G_{t-1}` only through the degree sequence, so [`DegreeState`] is a
//! sufficient statistic for the conditional attachment law.

use std::fmt;
use std::io::{BufRead, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Attachment rule of a growth model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelKind {
    /// Linear preferential attachment: `p_v = deg(v) / 2mt`.
    PrefAttach,
    /// Uniform attachment: `p_v = 1 / t`.
    UniformAttach,
    /// Shifted preferential attachment: `p_v = (deg(v) + a) / (2mt + at)`.
    AffinePrefAttach { a: f64 },
}

/// A named growth mechanism with `m` edges per arriving vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModelSpec")]
pub struct ModelSpec {
    #[serde(flatten)]
    pub kind: ModelKind,
    pub m: usize,
    pub label: String,
}

/// Deserialisation form: `m` defaults to 1 and `label` to the model's default label.
#[derive(Deserialize)]
struct RawModelSpec {
    #[serde(flatten)]
    kind: ModelKind,
    #[serde(default = "one")]
    m: usize,
    #[serde(default)]
    label: Option<String>,
}

fn one() -> usize {
    1
}

impl TryFrom<RawModelSpec> for ModelSpec {
    type Error = Error;

    fn try_from(raw: RawModelSpec) -> Result<Self> {
        let mut spec = ModelSpec::new(raw.kind, raw.m)?;
        if let Some(label) = raw.label {
            spec.label = label;
            spec.validate()?;
        }
        Ok(spec)
    }
}

/// Membership of a model in the class the test is guaranteed to work on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassCInfo {
    pub in_class_c: bool,
    /// Maximum number of vertices whose degree changes in one step.
    pub churn_bound: usize,
}

impl ModelSpec {
    pub fn pref_attach(m: usize) -> Result<Self> {
        Self::new(ModelKind::PrefAttach, m)
    }

    pub fn uniform(m: usize) -> Result<Self> {
        Self::new(ModelKind::UniformAttach, m)
    }

    pub fn affine(m: usize, a: f64) -> Result<Self> {
        Self::new(ModelKind::AffinePrefAttach { a }, m)
    }

    pub fn new(kind: ModelKind, m: usize) -> Result<Self> {
        let spec = ModelSpec {
            kind,
            m,
            label: default_label(kind, m),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Parses a CLI model name (`pa`, `uniform`, `affine-pa`).
    pub fn from_name(name: &str, m: usize, a: f64) -> Result<Self> {
        match name {
            "pa" => Self::pref_attach(m),
            "uniform" => Self::uniform(m),
            "affine-pa" => Self::affine(m, a),
            other => Err(Error::InvalidModel(format!(
                "unknown model '{other}' (expected pa, uniform or affine-pa)"
            ))),
        }
    }

    /// Short name used in file names and CLI flags.
    pub fn short_name(&self) -> &'static str {
        match self.kind {
            ModelKind::PrefAttach => "pa",
            ModelKind::UniformAttach => "uniform",
            ModelKind::AffinePrefAttach { .. } => "affine-pa",
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidModel("m must be at least 1".into()));
        }
        if let ModelKind::AffinePrefAttach { a } = self.kind {
            if !(a >= 0.0 && a.is_finite()) {
                return Err(Error::InvalidModel(format!("affine shift a={a} must be >= 0")));
            }
        }
        if self.label.is_empty() || self.label.chars().any(char::is_whitespace) {
            return Err(Error::InvalidModel(format!(
                "label '{}' must be non-empty without whitespace",
                self.label
            )));
        }
        Ok(())
    }

    pub fn class_c(&self) -> ClassCInfo {
        ClassCInfo {
            in_class_c: true,
            churn_bound: 2 * self.m,
        }
    }

    /// Probability increment per unit of degree at a state with `t` vertices,
    /// or `None` when the attachment law ignores degree.
    pub fn mass_per_degree(&self, t: usize) -> Option<f64> {
        let (m, t) = (self.m as f64, t as f64);
        match self.kind {
            ModelKind::PrefAttach => Some(1.0 / (2.0 * m * t)),
            ModelKind::UniformAttach => None,
            ModelKind::AffinePrefAttach { a } => Some(1.0 / (2.0 * m * t + a * t)),
        }
    }
}

fn default_label(kind: ModelKind, m: usize) -> String {
    let base = match kind {
        ModelKind::PrefAttach => "pa".to_string(),
        ModelKind::UniformAttach => "uniform".to_string(),
        ModelKind::AffinePrefAttach { a } => format!("affine-pa[a={a}]"),
    };
    if m == 1 {
        base
    } else {
        format!("{base}[m={m}]")
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// Degrees of `G_t`. Vertex ids are 1-based; `degrees[v - 1]` is `deg_t(v)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeState {
    m: usize,
    degrees: Vec<u64>,
    total_degree: u64,
}

impl DegreeState {
    /// `G_1`: vertex 1 with `m` self-loops.
    pub fn initial(m: usize) -> Self {
        DegreeState {
            m,
            degrees: vec![2 * m as u64],
            total_degree: 2 * m as u64,
        }
    }

    /// Builds a state from an explicit degree sequence (used by fixtures).
    pub fn from_degrees(m: usize, degrees: Vec<u64>) -> Self {
        let total_degree = degrees.iter().sum();
        DegreeState {
            m,
            degrees,
            total_degree,
        }
    }

    pub fn t(&self) -> usize {
        self.degrees.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    pub fn degree(&self, v: usize) -> u64 {
        self.degrees[v - 1]
    }

    pub fn total_degree(&self) -> u64 {
        self.total_degree
    }

    /// Adds vertex `t + 1` with edges to `targets` (all in `1..=t`).
    pub fn apply_arrival(&mut self, targets: &[u32]) {
        for &v in targets {
            self.degrees[v as usize - 1] += 1;
        }
        self.degrees.push(targets.len() as u64);
        self.total_degree += 2 * targets.len() as u64;
    }
}

/// Conditional attachment distribution `p_{t,·}` for arrival time `t`.
///
/// `mass[v - 1]` is the probability a single choice of vertex `t` goes to `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector {
    pub t: usize,
    pub mass: Vec<f64>,
}

impl ProbVector {
    pub fn new(t: usize, mass: Vec<f64>) -> Result<Self> {
        if mass.len() + 1 != t {
            return Err(Error::LengthMismatch {
                left: mass.len(),
                right: t.saturating_sub(1),
            });
        }
        Ok(ProbVector { t, mass })
    }

    pub fn prob(&self, v: usize) -> f64 {
        self.mass[v - 1]
    }
}

impl std::ops::Deref for ProbVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.mass
    }
}

/// Distribution of each of the `m` choices of the next arrival (`state.t() + 1`).
pub fn step_distribution(model: &ModelSpec, state: &DegreeState) -> Result<ProbVector> {
    let t = state.t();
    if t == 0 {
        return Err(Error::EmptyGraph);
    }
    let mass = match model.kind {
        ModelKind::PrefAttach => {
            let total = state.total_degree() as f64;
            state.degrees().iter().map(|&d| d as f64 / total).collect()
        }
        ModelKind::UniformAttach => vec![1.0 / t as f64; t],
        ModelKind::AffinePrefAttach { a } => {
            let total = state.total_degree() as f64 + a * t as f64;
            state.degrees().iter().map(|&d| (d as f64 + a) / total).collect()
        }
    };
    Ok(ProbVector { t: t + 1, mass })
}

/// One realised growth trajectory: the attachment choices of arrivals `2..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    n: usize,
    m: usize,
    choices: Vec<Vec<u32>>,
    model_label: String,
    seed: u64,
}

impl Trajectory {
    /// Validates and wraps `choices`, where `choices[i]` belongs to arrival `i + 2`.
    pub fn new(m: usize, choices: Vec<Vec<u32>>, model_label: impl Into<String>, seed: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidModel("m must be at least 1".into()));
        }
        for (i, targets) in choices.iter().enumerate() {
            let t = i + 2;
            if targets.len() != m {
                return Err(Error::Parse {
                    line: i + 2,
                    msg: format!("arrival {t} has {} targets, expected {m}", targets.len()),
                });
            }
            if let Some(&bad) = targets.iter().find(|&&v| v == 0 || v as usize >= t) {
                return Err(Error::Parse {
                    line: i + 2,
                    msg: format!("arrival {t} targets vertex {bad}, outside 1..={}", t - 1),
                });
            }
        }
        Ok(Trajectory {
            n: choices.len() + 1,
            m,
            choices,
            model_label: model_label.into(),
            seed,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn model_label(&self) -> &str {
        &self.model_label
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn choices(&self) -> &[Vec<u32>] {
        &self.choices
    }

    /// Targets chosen by arrival `t` (`2 <= t <= n`).
    pub fn targets(&self, t: usize) -> &[u32] {
        &self.choices[t - 2]
    }

    pub fn max_degree(&self) -> u64 {
        replay(self, self.n)
            .map(|s| s.degrees().iter().copied().max().unwrap_or(0))
            .unwrap_or(0)
    }

    /// Writes the `dyngof-traj v1` text format.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "dyngof-traj v1 n={} m={} model={} seed={}",
            self.n, self.m, self.model_label, self.seed
        )?;
        let mut line = String::new();
        for targets in &self.choices {
            line.clear();
            for (i, v) in targets.iter().enumerate() {
                if i > 0 {
                    line.push(' ');
                }
                line.push_str(&v.to_string());
            }
            writeln!(out, "{line}")?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads the `dyngof-traj v1` text format, rejecting anything malformed.
    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines.next().transpose()?.ok_or_else(|| Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let (n, m, label, seed) = parse_header(&header)?;
        let mut choices = Vec::with_capacity(n.saturating_sub(1));
        for (idx, line) in lines.enumerate() {
            let line = line?;
            let lineno = idx + 2;
            if line.trim().is_empty() {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "blank line".into(),
                });
            }
            let targets = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<u32>().map_err(|_| Error::Parse {
                        line: lineno,
                        msg: format!("bad vertex id '{tok}'"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            choices.push(targets);
        }
        if choices.len() + 1 != n {
            return Err(Error::Parse {
                line: choices.len() + 2,
                msg: format!("expected {} arrival lines, found {}", n - 1, choices.len()),
            });
        }
        Trajectory::new(m, choices, label, seed)
    }
}

fn parse_header(header: &str) -> Result<(usize, usize, String, u64)> {
    let bad = |msg: String| Error::Parse { line: 1, msg };
    let mut parts = header.split_whitespace();
    if parts.next() != Some("dyngof-traj") || parts.next() != Some("v1") {
        return Err(bad(format!("unrecognised header '{header}'")));
    }
    let (mut n, mut m, mut label, mut seed) = (None, None, None, None);
    for part in parts {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| bad(format!("bad header field '{part}'")))?;
        let num = |v: &str| v.parse::<u64>().map_err(|_| bad(format!("bad value for {key}: '{v}'")));
        match key {
            "n" => n = Some(num(value)? as usize),
            "m" => m = Some(num(value)? as usize),
            "model" => label = Some(value.to_string()),
            "seed" => seed = Some(num(value)?),
            _ => return Err(bad(format!("unknown header field '{key}'"))),
        }
    }
    match (n, m, label, seed) {
        (Some(n), Some(m), Some(label), Some(seed)) if n >= 2 && m >= 1 => Ok((n, m, label, seed)),
        (Some(n), Some(m), Some(_), Some(_)) => Err(bad(format!("need n >= 2 and m >= 1 (n={n}, m={m})"))),
        _ => Err(bad("header must contain n, m, model and seed".into())),
    }
}

/// Degree state of `G_t`, replaying arrivals `2..=t`.
pub fn replay(traj: &Trajectory, t: usize) -> Result<DegreeState> {
    if t == 0 || t > traj.n {
        return Err(Error::TimeOutOfRange { t, n: traj.n });
    }
    let mut state = DegreeState::initial(traj.m);
    for targets in &traj.choices[..t - 1] {
        state.apply_arrival(targets);
    }
    Ok(state)
}

/// Forward-only replay that can be advanced to increasing times.
#[derive(Debug, Clone)]
pub struct Replayer<'a> {
    traj: &'a Trajectory,
    state: DegreeState,
}

impl<'a> Replayer<'a> {
    pub fn new(traj: &'a Trajectory) -> Self {
        Replayer {
            traj,
            state: DegreeState::initial(traj.m),
        }
    }

    /// Advances to `G_t`. Times must be non-decreasing across calls.
    pub fn advance_to(&mut self, t: usize) -> Result<&DegreeState> {
        if t == 0 || t > self.traj.n || t < self.state.t() {
            return Err(Error::TimeOutOfRange { t, n: self.traj.n });
        }
        while self.state.t() < t {
            let next = self.state.t() + 1;
            self.state.apply_arrival(self.traj.targets(next));
        }
        Ok(&self.state)
    }

    pub fn state(&self) -> &DegreeState {
        &self.state
    }
}

/// Incremental sampler for one growth process.
///
/// Preferential choices are drawn by picking a uniform edge endpoint, which
/// selects `v` with probability `deg(v) / total_degree`. The endpoint list is
/// only extended after all `m` choices of an arrival, so those choices are iid
/// given `G_{t-1}`.
#[derive(Debug, Clone)]
pub struct GrowthSampler {
    model: ModelSpec,
    state: DegreeState,
    endpoints: Vec<u32>,
}

impl GrowthSampler {
    pub fn new(model: &ModelSpec) -> Result<Self> {
        model.validate()?;
        Ok(GrowthSampler {
            model: model.clone(),
            state: DegreeState::initial(model.m),
            endpoints: vec![1; 2 * model.m],
        })
    }

    pub fn state(&self) -> &DegreeState {
        &self.state
    }

    /// Draws the `m` targets of the next arrival without applying them.
    pub fn draw_targets<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u32> {
        let t = self.state.t();
        (0..self.model.m)
            .map(|_| match self.model.kind {
                ModelKind::PrefAttach => self.endpoints[rng.gen_range(0..self.endpoints.len())],
                ModelKind::UniformAttach => rng.gen_range(1..=t as u32),
                ModelKind::AffinePrefAttach { a } => {
                    let degree_weight = self.endpoints.len() as f64;
                    let total = degree_weight + a * t as f64;
                    if rng.gen::<f64>() * total < degree_weight {
                        self.endpoints[rng.gen_range(0..self.endpoints.len())]
                    } else {
                        rng.gen_range(1..=t as u32)
                    }
                }
            })
            .collect()
    }

    pub fn apply(&mut self, targets: &[u32]) {
        let new_vertex = self.state.t() as u32 + 1;
        for &v in targets {
            self.endpoints.push(v);
            self.endpoints.push(new_vertex);
        }
        self.state.apply_arrival(targets);
    }

    /// Draws and applies the next arrival, returning its targets.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Vec<u32> {
        let targets = self.draw_targets(rng);
        self.apply(&targets);
        targets
    }
}

/// Samples a trajectory of `n` vertices from `model`, reproducible from `seed`.
pub fn sample_trajectory(model: &ModelSpec, n: usize, seed: u64) -> Result<Trajectory> {
    sample_trajectory_with(model, n, &mut stream_rng(seed, 0), seed)
}

/// Samples using a caller-provided stream; `seed` is only recorded in the result.
pub fn sample_trajectory_with<R: Rng + ?Sized>(
    model: &ModelSpec,
    n: usize,
    rng: &mut R,
    seed: u64,
) -> Result<Trajectory> {
    if n < 2 {
        return Err(Error::HorizonTooShort { n, min: 2 });
    }
    let mut sampler = GrowthSampler::new(model)?;
    let choices = (2..=n).map(|_| sampler.step(rng)).collect();
    Ok(Trajectory {
        n,
        m: model.m,
        choices,
        model_label: model.label.clone(),
        seed,
    })
}
