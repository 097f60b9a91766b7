//! The goodness-of-fit test.
//!
//! `S = Σ_j TV(μ̂_{r_j}, p^{M0}_{r_j})` sums, over random probe times, the
//! distance between what the trajectory did in a window after `r_j` and what
//! the null model says it should do at `r_j`. Under the null the statistic
//! concentrates around its own mean (the sampling radius `E_{M0}[S_{M0}]`),
//! so the test rejects when `S > E_{M0}[S_{M0}] + D/2`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{sample_trajectory, step_distribution, GrowthSampler, ModelSpec, ProbVector, Replayer, Trajectory};
use crate::rng::{derive_seed, stream_rng, StreamRng};
use crate::sampling::{empirical_measure, sample_probe_points, tv_dense, tv_distance, ProbePlan};

/// Default number of null trajectories used to estimate the threshold.
pub const DEFAULT_ALPHA_REPLICATIONS: usize = 32;

/// Where the sampling radius in the threshold comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum AlphaMode {
    /// Estimate `E_{M0}[S_{M0}]` from this many fresh null trajectories.
    Sampled { replications: usize },
    /// Use a supplied value of `E_{M0}[S_{M0}]`.
    Fixed { radius: f64 },
}

impl Default for AlphaMode {
    fn default() -> Self {
        AlphaMode::Sampled {
            replications: DEFAULT_ALPHA_REPLICATIONS,
        }
    }
}

impl FromStr for AlphaMode {
    type Err = Error;

    /// Parses `sampled:<reps>` or `fixed:<radius>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("alpha mode '{s}' is not sampled:<reps> or fixed:<value>"));
        let (mode, value) = s.split_once(':').ok_or_else(bad)?;
        match mode {
            "sampled" => Ok(AlphaMode::Sampled {
                replications: value.parse().map_err(|_| bad())?,
            }),
            "fixed" => Ok(AlphaMode::Fixed {
                radius: value.parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for AlphaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaMode::Sampled { replications } => write!(f, "sampled:{replications}"),
            AlphaMode::Fixed { radius } => write!(f, "fixed:{radius}"),
        }
    }
}

/// Inputs of one run of the test besides the trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    pub null_model: ModelSpec,
    /// Separation margin `D`; the threshold is `radius + D/2`.
    pub d: f64,
    /// `C(n) = ⌈width_fraction · n⌉`.
    #[serde(default = "default_width_fraction")]
    pub width_fraction: f64,
    /// `M(n) = ⌈probe_fraction · n⌉`.
    #[serde(default = "default_probe_fraction")]
    pub probe_fraction: f64,
    #[serde(default)]
    pub alpha_mode: AlphaMode,
    #[serde(default)]
    pub seed: u64,
}

pub const DEFAULT_WIDTH_FRACTION: f64 = 0.1;
pub const DEFAULT_PROBE_FRACTION: f64 = 0.5;

fn default_width_fraction() -> f64 {
    DEFAULT_WIDTH_FRACTION
}

fn default_probe_fraction() -> f64 {
    DEFAULT_PROBE_FRACTION
}

fn ceil_fraction(fraction: f64, n: usize) -> usize {
    // 0.1 * 500 must give 50, not 51.
    ((fraction * n as f64) - 1e-9).ceil().max(1.0) as usize
}

impl TestConfig {
    pub fn new(null_model: ModelSpec, d: f64) -> Self {
        TestConfig {
            null_model,
            d,
            width_fraction: DEFAULT_WIDTH_FRACTION,
            probe_fraction: DEFAULT_PROBE_FRACTION,
            alpha_mode: AlphaMode::default(),
            seed: 0,
        }
    }

    /// Sample width `C(n)`.
    pub fn width(&self, n: usize) -> usize {
        ceil_fraction(self.width_fraction, n)
    }

    /// Number of probe points `M(n)`.
    pub fn probes(&self, n: usize) -> usize {
        ceil_fraction(self.probe_fraction, n)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        self.null_model.validate()?;
        if !(self.d > 0.0 && self.d.is_finite()) {
            return Err(Error::InvalidConfig(format!("D must be positive (got {})", self.d)));
        }
        for (name, f) in [("width_fraction", self.width_fraction), ("probe_fraction", self.probe_fraction)] {
            if !(f > 0.0 && f < 1.0) {
                return Err(Error::InvalidConfig(format!("{name} must lie in (0, 1) (got {f})")));
            }
        }
        match self.alpha_mode {
            AlphaMode::Fixed { radius } if !(radius >= 0.0 && radius.is_finite()) => {
                return Err(Error::InvalidConfig(format!("fixed alpha radius must be >= 0 (got {radius})")));
            }
            AlphaMode::Sampled { replications } if replications < 2 => {
                return Err(Error::InvalidConfig("sampled alpha needs at least 2 replications".into()));
            }
            _ => {}
        }
        let width = self.width(n);
        if width + 2 > n {
            return Err(Error::WindowExceedsHorizon { t: 2, width, n });
        }
        Ok(())
    }
}

/// Value of the statistic on one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct StatisticValue {
    pub s: f64,
    pub per_probe_tv: Vec<f64>,
    /// Probes whose window had no choice landing in `1..r` (scored as TV = 1).
    pub zero_denom_count: usize,
}

/// `S = Σ_j TV(μ̂_{r_j}, p^{null}_{r_j})` with one forward replay over the sorted probes.
pub fn test_statistic(traj: &Trajectory, null_model: &ModelSpec, plan: &ProbePlan) -> Result<StatisticValue> {
    if traj.m() != null_model.m {
        return Err(Error::EdgeCountMismatch {
            trajectory: traj.m(),
            model: null_model.m,
        });
    }
    if !plan.fits(traj.n()) {
        return Err(Error::WindowExceedsHorizon {
            t: *plan.points().last().unwrap_or(&0),
            width: plan.width(),
            n: traj.n(),
        });
    }
    let mut replayer = Replayer::new(traj);
    let mut cached: Option<ProbVector> = None;
    let mut per_probe_tv = Vec::with_capacity(plan.count());
    let mut zero_denom_count = 0;
    for &r in plan.points() {
        if cached.as_ref().is_none_or(|p| p.t != r) {
            let state = replayer.advance_to(r - 1)?;
            cached = Some(step_distribution(null_model, state)?);
        }
        let probs = cached.as_ref().expect("distribution cached above");
        let emp = empirical_measure(traj, r, plan.width())?;
        if emp.denom == 0 {
            zero_denom_count += 1;
        }
        per_probe_tv.push(tv_distance(&emp, probs)?);
    }
    Ok(StatisticValue {
        s: per_probe_tv.iter().sum(),
        per_probe_tv,
        zero_denom_count,
    })
}

/// Mean and spread of `S` over independent replications.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusEstimate {
    pub mean: f64,
    pub std: f64,
    pub replications: usize,
    pub n: usize,
}

impl RadiusEstimate {
    pub fn from_samples(samples: &[f64], n: usize) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidConfig("need at least 2 replications".into()));
        }
        let (mean, std) = mean_std(samples);
        Ok(RadiusEstimate {
            mean,
            std,
            replications: samples.len(),
            n,
        })
    }

    /// Standard error of the mean.
    pub fn std_err(&self) -> f64 {
        self.std / (self.replications as f64).sqrt()
    }
}

/// Sample mean and (n-1)-normalised standard deviation.
pub fn mean_std(samples: &[f64]) -> (f64, f64) {
    let k = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / k;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, var.sqrt())
}

/// How each replication obtains its probe plan.
#[derive(Debug, Clone)]
pub enum PlanSource {
    /// Fresh uniform plan with `count` probes of width `width` per replication.
    Random { count: usize, width: usize },
    Fixed(ProbePlan),
}

impl PlanSource {
    fn draw(&self, n: usize, rng: &mut StreamRng) -> Result<ProbePlan> {
        match self {
            PlanSource::Random { count, width } => sample_probe_points(n, *count, *width, rng),
            PlanSource::Fixed(plan) => Ok(plan.clone()),
        }
    }
}

/// Samples of `S_{null}` on trajectories drawn from `source`.
///
/// Replication `i` uses trajectory seed `derive_seed(seed, i)` and probe
/// stream 1 of that seed, so two calls with the same `seed` but different
/// `source` models share their random numbers.
pub fn statistic_samples(
    source: &ModelSpec,
    null_model: &ModelSpec,
    n: usize,
    plans: &PlanSource,
    replications: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    (0..replications)
        .into_par_iter()
        .map(|i| {
            let rep_seed = derive_seed(seed, i as u64);
            let traj = sample_trajectory(source, n, rep_seed)?;
            let plan = plans.draw(n, &mut stream_rng(rep_seed, 1))?;
            Ok(test_statistic(&traj, null_model, &plan)?.s)
        })
        .collect()
}

/// Estimates `E_M[S_M]` at horizon `n` using `cfg`'s width and probe fractions.
pub fn sampling_radius_estimate(
    model: &ModelSpec,
    n: usize,
    cfg: &TestConfig,
    replications: usize,
    seed: u64,
) -> Result<RadiusEstimate> {
    if replications < 2 {
        return Err(Error::InvalidConfig("radius estimation needs at least 2 replications".into()));
    }
    let plans = PlanSource::Random {
        count: cfg.probes(n),
        width: cfg.width(n),
    };
    let samples = statistic_samples(model, model, n, &plans, replications, seed)?;
    RadiusEstimate::from_samples(&samples, n)
}

/// Estimates `E_M[S_M]` with the same probe plan in every replication.
pub fn fixed_plan_radius_estimate(
    model: &ModelSpec,
    n: usize,
    plan: &ProbePlan,
    replications: usize,
    seed: u64,
) -> Result<RadiusEstimate> {
    if replications < 2 {
        return Err(Error::InvalidConfig("radius estimation needs at least 2 replications".into()));
    }
    let samples = statistic_samples(model, model, n, &PlanSource::Fixed(plan.clone()), replications, seed)?;
    RadiusEstimate::from_samples(&samples, n)
}

/// Monte Carlo estimate of the semimetric with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DnEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub replications: usize,
    pub n: usize,
}

/// `d_n(M0, M1) = ½ Σ_{j=1}^{n-1} E_{Z ~ M1 at time j}[TV(p^{M0}_{j+1|Z}, p^{M1}_{j+1|Z})]`.
pub fn dn_estimate_detailed(m0: &ModelSpec, m1: &ModelSpec, n: usize, replications: usize, seed: u64) -> Result<DnEstimate> {
    if replications == 0 {
        return Err(Error::InvalidConfig("dn estimation needs at least 1 replication".into()));
    }
    if m0.m != m1.m {
        return Err(Error::EdgeCountMismatch {
            trajectory: m1.m,
            model: m0.m,
        });
    }
    if n == 0 {
        return Err(Error::HorizonTooShort { n, min: 1 });
    }
    let samples = (0..replications)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(derive_seed(seed, i as u64), 0);
            let mut sampler = GrowthSampler::new(m1)?;
            let mut sum = 0.0;
            for j in 1..n {
                let state = sampler.state();
                let p0 = step_distribution(m0, state)?;
                let p1 = step_distribution(m1, state)?;
                sum += tv_dense(&p0, &p1)?;
                if j + 1 < n {
                    sampler.step(&mut rng);
                }
            }
            Ok(0.5 * sum)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (mean, std) = mean_std(&samples);
    Ok(DnEstimate {
        mean,
        std_err: std / (replications as f64).sqrt(),
        replications,
        n,
    })
}

pub fn dn_estimate(m0: &ModelSpec, m1: &ModelSpec, n: usize, replications: usize, seed: u64) -> Result<f64> {
    Ok(dn_estimate_detailed(m0, m1, n, replications, seed)?.mean)
}

/// Outcome of one run of the test.
#[derive(Debug, Clone, PartialEq)]
pub struct TestReport {
    pub s: f64,
    pub alpha: f64,
    pub decision: bool,
    pub probes: ProbePlan,
    pub per_probe_tv: Vec<f64>,
    pub zero_denom_count: usize,
    /// The value of `E_{M0}[S_{M0}]` used in the threshold.
    pub radius_estimate: f64,
    pub radius_std: f64,
    pub seed: u64,
}

/// Wire form of [`TestReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReportJson {
    #[serde(rename = "S")]
    pub s: f64,
    pub alpha: f64,
    pub decision: u8,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "C")]
    pub c: usize,
    pub zero_denom_count: usize,
    pub radius_mean: f64,
    pub radius_std: f64,
    pub seed: u64,
}

impl TestReport {
    pub fn to_json(&self) -> TestReportJson {
        TestReportJson {
            s: self.s,
            alpha: self.alpha,
            decision: u8::from(self.decision),
            m: self.probes.count(),
            c: self.probes.width(),
            zero_denom_count: self.zero_denom_count,
            radius_mean: self.radius_estimate,
            radius_std: self.radius_std,
            seed: self.seed,
        }
    }
}

/// Runs the test on `traj`. The result is a deterministic function of `(traj, cfg)`.
///
/// Probe points come from stream 0 of `cfg.seed`; a sampled radius uses
/// replications seeded from `derive_seed(cfg.seed, 1)`.
pub fn test_dynamic_graph(traj: &Trajectory, cfg: &TestConfig) -> Result<TestReport> {
    let n = traj.n();
    cfg.validate(n)?;
    let plan = sample_probe_points(n, cfg.probes(n), cfg.width(n), &mut stream_rng(cfg.seed, 0))?;
    let stat = test_statistic(traj, &cfg.null_model, &plan)?;
    let (radius, radius_std) = match cfg.alpha_mode {
        AlphaMode::Sampled { replications } => {
            let est = sampling_radius_estimate(&cfg.null_model, n, cfg, replications, derive_seed(cfg.seed, 1))?;
            (est.mean, est.std)
        }
        AlphaMode::Fixed { radius } => (radius, 0.0),
    };
    let alpha = radius + cfg.d / 2.0;
    Ok(TestReport {
        s: stat.s,
        alpha,
        decision: stat.s > alpha,
        probes: plan,
        per_probe_tv: stat.per_probe_tv,
        zero_denom_count: stat.zero_denom_count,
        radius_estimate: radius,
        radius_std,
        seed: cfg.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::replay;
    use proptest::prelude::*;

    fn pa1() -> ModelSpec {
        ModelSpec::pref_attach(1).unwrap()
    }

    fn traj(choices: &[u32]) -> Trajectory {
        Trajectory::new(1, choices.iter().map(|&c| vec![c]).collect(), "fixture", 0).unwrap()
    }

    #[test]
    fn width_and_probe_counts() {
        let cfg = TestConfig::new(pa1(), 1.0);
        assert_eq!(cfg.width(500), 50);
        assert_eq!(cfg.probes(500), 250);
        assert_eq!(cfg.width(4000), 400);
        assert_eq!(cfg.width(101), 11);
    }

    #[test]
    fn alpha_mode_parsing() {
        assert_eq!("sampled:32".parse::<AlphaMode>().unwrap(), AlphaMode::Sampled { replications: 32 });
        assert_eq!("fixed:2.5".parse::<AlphaMode>().unwrap(), AlphaMode::Fixed { radius: 2.5 });
        assert!("fixed".parse::<AlphaMode>().is_err());
        assert!("exact:1".parse::<AlphaMode>().is_err());
        assert_eq!(AlphaMode::Fixed { radius: 2.5 }.to_string(), "fixed:2.5");
    }

    #[test]
    fn statistic_hand_traces() {
        // Probe r=2, C=2: arrivals 2, 3 pick vertex 1; p_2 = [1].
        let plan = ProbePlan::new(vec![2], 2, 4).unwrap();
        let v = test_statistic(&traj(&[1, 1, 2]), &pa1(), &plan).unwrap();
        assert_eq!(v.s, 0.0);

        // Probe r=3, C=2: arrivals 3, 4 pick vertex 2; p_3 = [3/4, 1/4].
        let plan = ProbePlan::new(vec![3], 2, 4).unwrap();
        let v = test_statistic(&traj(&[1, 2, 2]), &pa1(), &plan).unwrap();
        assert_eq!(v.s, 0.75);
        assert_eq!(v.per_probe_tv, vec![0.75]);
        assert_eq!(v.zero_denom_count, 0);
    }

    #[test]
    fn statistic_zero_when_window_matches() {
        // p_3 = [3/4, 1/4]; arrivals 3..=6 hit 1, 1, 1, 2.
        let tr = traj(&[1, 1, 1, 1, 2]);
        let plan = ProbePlan::new(vec![3], 4, 6).unwrap();
        let v = test_statistic(&tr, &pa1(), &plan).unwrap();
        assert_eq!(v.s, 0.0);
    }

    #[test]
    fn statistic_rejects_bad_inputs() {
        let plan = ProbePlan::new(vec![3], 3, 5).unwrap();
        assert!(test_statistic(&traj(&[1, 1, 2]), &pa1(), &plan).is_err());
        let plan = ProbePlan::new(vec![2], 1, 4).unwrap();
        assert!(matches!(
            test_statistic(&traj(&[1, 1, 2]), &ModelSpec::pref_attach(2).unwrap(), &plan),
            Err(Error::EdgeCountMismatch { .. })
        ));
    }

    #[test]
    fn repeated_probes_count_twice() {
        let plan = ProbePlan::new(vec![3, 3], 2, 4).unwrap();
        let v = test_statistic(&traj(&[1, 2, 2]), &pa1(), &plan).unwrap();
        assert_eq!(v.s, 1.5);
    }

    /// Exact E[S] for PA(1), n=4, probe r=2, C=2 by enumerating the six trajectories.
    #[test]
    fn radius_matches_enumeration() {
        let plan = ProbePlan::new(vec![2], 2, 4).unwrap();
        // Arrivals 2 and 3 always land on vertex 1 (the only vertex before r=2),
        // so every window is δ_1 and S = 0 on every trajectory.
        let est = fixed_plan_radius_estimate(&pa1(), 4, &plan, 200, 3).unwrap();
        assert_eq!(est.mean, 0.0);

        // Probe r=3, C=2: enumerate (c3, c4) with c3 in {1,2}, c4 in {1,2,3}.
        let plan = ProbePlan::new(vec![3], 2, 4).unwrap();
        let mut exact = 0.0;
        for c3 in 1..=2u32 {
            let p3 = if c3 == 1 { 0.75 } else { 0.25 };
            let deg = if c3 == 1 { [4.0, 1.0, 1.0] } else { [3.0, 2.0, 1.0] };
            for c4 in 1..=3u32 {
                let p4 = deg[c4 as usize - 1] / 6.0;
                let s = test_statistic(&traj(&[1, c3, c4]), &pa1(), &plan).unwrap().s;
                exact += p3 * p4 * s;
            }
        }
        let reps = 20_000;
        let est = fixed_plan_radius_estimate(&pa1(), 4, &plan, reps, 17).unwrap();
        assert!((est.mean - exact).abs() <= 3.0 * est.std_err(), "mc={} exact={exact}", est.mean);
    }

    #[test]
    fn radius_bounds_and_standard_error_scaling() {
        let cfg = TestConfig::new(pa1(), 1.0);
        let n = 60;
        let est = sampling_radius_estimate(&pa1(), n, &cfg, 50, 1).unwrap();
        assert!(est.mean >= 0.0 && est.mean <= cfg.probes(n) as f64);
        assert!(sampling_radius_estimate(&pa1(), n, &cfg, 1, 1).is_err());

        // Spread of the mean across independent batches shrinks like 1/sqrt(reps).
        let batches = 30;
        let spread = |reps: usize| {
            let means: Vec<f64> = (0..batches)
                .map(|b| sampling_radius_estimate(&pa1(), n, &cfg, reps, 1000 + b).unwrap().mean)
                .collect();
            mean_std(&means).1
        };
        let (s10, s40, s160) = (spread(10), spread(40), spread(160));
        let slope = ((s160 / s10).ln()) / (16f64).ln();
        assert!(s10 > s40 && s40 > s160, "{s10} {s40} {s160}");
        assert!((slope + 0.5).abs() < 0.2, "slope={slope}");
    }

    #[test]
    fn dn_identity_and_hand_value() {
        for m in [pa1(), ModelSpec::uniform(1).unwrap(), ModelSpec::affine(1, 2.0).unwrap()] {
            assert_eq!(dn_estimate(&m, &m, 100, 10, 4).unwrap(), 0.0);
        }
        let est = dn_estimate_detailed(&pa1(), &ModelSpec::uniform(1).unwrap(), 3, 1000, 5).unwrap();
        assert_eq!(est.mean, 0.125);
        assert_eq!(est.std_err, 0.0);
    }

    #[test]
    fn dn_is_monotone_in_n() {
        let (a, b) = (pa1(), ModelSpec::uniform(1).unwrap());
        let mut prev = 0.0;
        for n in [2, 5, 10, 20, 40] {
            let d = dn_estimate(&a, &b, n, 20, 8).unwrap();
            assert!(d >= prev);
            prev = d;
        }
        assert!(dn_estimate(&a, &ModelSpec::uniform(2).unwrap(), 5, 1, 0).is_err());
    }

    #[test]
    fn decision_rule_fixture() {
        let tr = sample_trajectory(&pa1(), 200, 3).unwrap();
        let mut cfg = TestConfig::new(pa1(), 4.0);
        cfg.alpha_mode = AlphaMode::Fixed { radius: 1000.0 };
        let r = test_dynamic_graph(&tr, &cfg).unwrap();
        assert!(!r.decision);
        assert_eq!(r.alpha, 1002.0);
        cfg.alpha_mode = AlphaMode::Fixed { radius: 0.0 };
        cfg.d = 1e-9;
        let r = test_dynamic_graph(&tr, &cfg).unwrap();
        assert!(r.decision);
        cfg.alpha_mode = AlphaMode::Fixed { radius: -1.0 };
        assert!(test_dynamic_graph(&tr, &cfg).is_err());
    }

    #[test]
    fn test_is_deterministic_and_reports_json_fields() {
        let tr = sample_trajectory(&pa1(), 150, 9).unwrap();
        let mut cfg = TestConfig::new(pa1(), 2.0);
        cfg.alpha_mode = AlphaMode::Sampled { replications: 8 };
        cfg.seed = 77;
        let a = test_dynamic_graph(&tr, &cfg).unwrap();
        let b = test_dynamic_graph(&tr, &cfg).unwrap();
        assert_eq!(a, b);
        let json = serde_json::to_value(a.to_json()).unwrap();
        let keys: Vec<&str> = json.as_object().unwrap().keys().map(String::as_str).collect();
        let mut expected = vec!["S", "alpha", "decision", "M", "C", "zero_denom_count", "radius_mean", "radius_std", "seed"];
        expected.sort();
        let mut keys = keys;
        keys.sort();
        assert_eq!(keys, expected);
        assert_eq!(json["M"], 75);
        assert_eq!(json["C"], 15);
    }

    #[test]
    fn infeasible_config() {
        let tr = sample_trajectory(&pa1(), 10, 0).unwrap();
        let mut cfg = TestConfig::new(pa1(), 1.0);
        cfg.width_fraction = 0.9;
        assert!(test_dynamic_graph(&tr, &cfg).is_err());
        cfg.width_fraction = 0.1;
        cfg.d = 0.0;
        assert!(test_dynamic_graph(&tr, &cfg).is_err());
    }

    proptest! {
        /// TV(p1, p0) <= TV(μ̂, p0) + TV(μ̂, p1) at every probe.
        #[test]
        fn triangle_inequality_per_probe(seed in any::<u64>(), n in 20usize..150) {
            let (m0, m1) = (pa1(), ModelSpec::uniform(1).unwrap());
            let tr = sample_trajectory(&m1, n, seed).unwrap();
            let width = n / 5;
            let plan = sample_probe_points(n, 6, width, &mut stream_rng(seed, 9)).unwrap();
            for &r in plan.points() {
                let state = replay(&tr, r - 1).unwrap();
                let p0 = step_distribution(&m0, &state).unwrap();
                let p1 = step_distribution(&m1, &state).unwrap();
                let emp = empirical_measure(&tr, r, width).unwrap();
                let lhs = tv_dense(&p1, &p0).unwrap();
                let rhs = tv_distance(&emp, &p0).unwrap() + tv_distance(&emp, &p1).unwrap();
                prop_assert!(lhs <= rhs + 1e-12);
            }
        }

        #[test]
        fn dn_is_nonnegative(seed in any::<u64>(), n in 2usize..40, a in 0.0f64..3.0) {
            let d = dn_estimate(&ModelSpec::affine(1, a).unwrap(), &pa1(), n, 3, seed).unwrap();
            prop_assert!(d >= 0.0);
        }
    }
}
