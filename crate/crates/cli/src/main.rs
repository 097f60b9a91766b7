//! `dyngof`: generate growth trajectories, run the goodness-of-fit test and
//! drive the Monte Carlo experiments.
//!
//! Machine-readable output (JSON, trajectories) goes to stdout; human prose
//! goes to stderr. `test` exits with the decision bit; every error exits 2.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use dyngof::gof::{DEFAULT_ALPHA_REPLICATIONS, DEFAULT_PROBE_FRACTION, DEFAULT_WIDTH_FRACTION};
use dyngof::harness::{
    enumerate_trajectories, enumeration_oracle, run_and_persist, ExperimentConfig, ExperimentKind, Functional,
};
use dyngof::{
    dn_estimate_detailed, sample_trajectory, sampling_radius_estimate, test_dynamic_graph, AlphaMode, ModelSpec,
    ProbePlan, TestConfig, Trajectory,
};
use num_traits::ToPrimitive;
use serde_json::json;

#[derive(Debug, Parser)]
#[command(name = "dyngof", version, about = "Goodness-of-fit testing for growing random graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a trajectory and write it in the dyngof-traj v1 format.
    Generate(GenerateArgs),
    /// Test a trajectory file against a null model (exit code = decision).
    Test(TestArgs),
    /// Estimate a model's sampling radius E[S].
    Radius(RadiusArgs),
    /// Estimate the semimetric d_n(m0, m1).
    Distance(DistanceArgs),
    /// Run a Monte Carlo experiment and write CSV plus a JSON manifest.
    Experiment(ExperimentArgs),
    /// Exact enumeration for tiny instances (n <= 6, m = 1).
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Model: pa, uniform or affine-pa.
    #[arg(long, default_value = "pa")]
    model: String,
    /// Edges per arriving vertex.
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Shift for affine-pa.
    #[arg(long, default_value_t = 0.0)]
    a: f64,
}

impl ModelArgs {
    fn spec(&self) -> Result<ModelSpec> {
        Ok(ModelSpec::from_name(&self.model, self.m, self.a)?)
    }
}

#[derive(Debug, Args)]
struct FractionArgs {
    #[arg(long = "width-fraction", default_value_t = DEFAULT_WIDTH_FRACTION)]
    width_fraction: f64,
    #[arg(long = "probe-fraction", default_value_t = DEFAULT_PROBE_FRACTION)]
    probe_fraction: f64,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TestArgs {
    /// Trajectory file in the dyngof-traj v1 format.
    traj: PathBuf,
    /// Null model (m is taken from the trajectory).
    #[arg(long, default_value = "pa")]
    model: String,
    #[arg(long, default_value_t = 0.0)]
    a: f64,
    /// Separation margin; the threshold is radius + D/2.
    #[arg(long = "D")]
    d: f64,
    #[command(flatten)]
    fractions: FractionArgs,
    /// sampled:<reps> or fixed:<radius>.
    #[arg(long, default_value_t = AlphaMode::Sampled { replications: DEFAULT_ALPHA_REPLICATIONS })]
    alpha: AlphaMode,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct RadiusArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    fractions: FractionArgs,
    #[arg(long, default_value_t = DEFAULT_ALPHA_REPLICATIONS)]
    replications: usize,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct DistanceArgs {
    #[arg(long, default_value = "pa")]
    m0: String,
    #[arg(long, default_value = "uniform")]
    m1: String,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = 0.0)]
    a: f64,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    replications: usize,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// success-rate, concentration, tail-exponent, radius-scan or calibration.
    #[arg(long)]
    experiment: Option<ExperimentKind>,
    /// JSON experiment config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    m0: Option<String>,
    #[arg(long)]
    m1: Option<String>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    a: Option<f64>,
    /// Comma-separated increasing horizons.
    #[arg(long = "n-values", value_delimiter = ',')]
    n_values: Option<Vec<usize>>,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long = "D")]
    d: Option<f64>,
    /// Per-vertex separation rate; the test at horizon n uses D = rate * n.
    #[arg(long = "d-per-vertex")]
    d_per_vertex: Option<f64>,
    #[arg(long = "width-fraction")]
    width_fraction: Option<f64>,
    #[arg(long = "probe-fraction")]
    probe_fraction: Option<f64>,
    #[arg(long)]
    alpha: Option<AlphaMode>,
    /// CSV path, or a directory for an auto-named CSV.
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum FunctionalName {
    TrajProbs,
    ExpectedS,
    Dn,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum)]
    functional: FunctionalName,
    /// Probe times for expected-s (comma-separated).
    #[arg(long, value_delimiter = ',')]
    probes: Option<Vec<usize>>,
    /// Window width for expected-s.
    #[arg(long)]
    width: Option<usize>,
    /// Alternative model for dn.
    #[arg(long)]
    m1: Option<String>,
}

fn seed_or_sample(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let seed = rand::random::<u64>();
        eprintln!("seed: {seed}");
        seed
    })
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn generate(args: &GenerateArgs) -> Result<()> {
    let model = args.model.spec()?;
    let seed = seed_or_sample(args.seed);
    let traj = sample_trajectory(&model, args.n, seed)?;
    match &args.out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
            traj.write_to(BufWriter::new(file))?;
        }
        None => traj.write_to(BufWriter::new(io::stdout().lock()))?,
    }
    eprintln!(
        "generated n={} m={} model={} seed={} max_degree={}",
        traj.n(),
        traj.m(),
        traj.model_label(),
        seed,
        traj.max_degree()
    );
    Ok(())
}

fn test(args: &TestArgs) -> Result<u8> {
    let file = File::open(&args.traj).with_context(|| format!("cannot read {}", args.traj.display()))?;
    let traj = Trajectory::read_from(BufReader::new(file)).with_context(|| format!("in {}", args.traj.display()))?;
    let cfg = TestConfig {
        null_model: ModelSpec::from_name(&args.model, traj.m(), args.a)?,
        d: args.d,
        width_fraction: args.fractions.width_fraction,
        probe_fraction: args.fractions.probe_fraction,
        alpha_mode: args.alpha,
        seed: seed_or_sample(args.seed),
    };
    let report = test_dynamic_graph(&traj, &cfg)?;
    print_json(&report.to_json())?;
    eprintln!(
        "S={:.6} alpha={:.6} decision={}",
        report.s,
        report.alpha,
        u8::from(report.decision)
    );
    Ok(u8::from(report.decision))
}

fn radius(args: &RadiusArgs) -> Result<()> {
    let model = args.model.spec()?;
    let seed = seed_or_sample(args.seed);
    let mut cfg = TestConfig::new(model.clone(), 1.0);
    cfg.width_fraction = args.fractions.width_fraction;
    cfg.probe_fraction = args.fractions.probe_fraction;
    cfg.validate(args.n)?;
    let est = sampling_radius_estimate(&model, args.n, &cfg, args.replications, seed)?;
    print_json(&json!({
        "model": model.label,
        "n": est.n,
        "M": cfg.probes(args.n),
        "C": cfg.width(args.n),
        "mean": est.mean,
        "std": est.std,
        "std_err": est.std_err(),
        "replications": est.replications,
        "seed": seed,
    }))
}

fn distance(args: &DistanceArgs) -> Result<()> {
    let m0 = ModelSpec::from_name(&args.m0, args.m, args.a)?;
    let m1 = ModelSpec::from_name(&args.m1, args.m, args.a)?;
    let seed = seed_or_sample(args.seed);
    let est = dn_estimate_detailed(&m0, &m1, args.n, args.replications, seed)?;
    print_json(&json!({
        "m0": m0.label,
        "m1": m1.label,
        "n": est.n,
        "dn": est.mean,
        "std_err": est.std_err,
        "replications": est.replications,
        "seed": seed,
    }))
}

fn experiment_config(args: &ExperimentArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let file = File::open(path).with_context(|| format!("cannot read {}", path.display()))?;
            serde_json::from_reader(BufReader::new(file)).with_context(|| format!("bad config {}", path.display()))?
        }
        None => {
            let null = ModelSpec::pref_attach(1)?;
            ExperimentConfig {
                experiment: args.experiment.context("--experiment is required without --config")?,
                null_model: null.clone(),
                alt_model: ModelSpec::uniform(1)?,
                n_values: vec![500, 1000, 2000],
                replications: 50,
                test_config: TestConfig::new(null, 1.0),
                output_path: ".".into(),
                d_per_vertex: None,
                seed: 0,
            }
        }
    };
    if let Some(kind) = args.experiment {
        cfg.experiment = kind;
    }
    let m = args.m.unwrap_or(cfg.null_model.m);
    let a = args.a.unwrap_or(0.0);
    if let Some(name) = &args.m0 {
        cfg.null_model = ModelSpec::from_name(name, m, a)?;
    } else if args.m.is_some() {
        cfg.null_model = ModelSpec::new(cfg.null_model.kind, m)?;
    }
    if let Some(name) = &args.m1 {
        cfg.alt_model = ModelSpec::from_name(name, m, a)?;
    } else if args.m.is_some() {
        cfg.alt_model = ModelSpec::new(cfg.alt_model.kind, m)?;
    }
    cfg.test_config.null_model = cfg.null_model.clone();
    if let Some(v) = &args.n_values {
        cfg.n_values = v.clone();
    }
    if let Some(r) = args.replications {
        cfg.replications = r;
    }
    if let Some(d) = args.d {
        cfg.test_config.d = d;
    }
    if args.d_per_vertex.is_some() {
        cfg.d_per_vertex = args.d_per_vertex;
    }
    if let Some(f) = args.width_fraction {
        cfg.test_config.width_fraction = f;
    }
    if let Some(f) = args.probe_fraction {
        cfg.test_config.probe_fraction = f;
    }
    if let Some(mode) = args.alpha {
        cfg.test_config.alpha_mode = mode;
    }
    if let Some(out) = &args.out {
        cfg.output_path = out.clone();
    }
    if args.seed.is_some() || args.config.is_none() {
        cfg.seed = seed_or_sample(args.seed);
    }
    cfg.test_config.seed = cfg.seed;
    Ok(cfg)
}

fn experiment(args: &ExperimentArgs) -> Result<()> {
    let cfg = experiment_config(args)?;
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let out = run_and_persist(&cfg, timestamp)?;
    eprintln!("wrote {}", out.csv_path.display());
    print_json(&json!({
        "experiment": cfg.experiment.name(),
        "csv": out.csv_path.display().to_string(),
        "manifest": out.manifest_path.display().to_string(),
        "seed": cfg.seed,
    }))
}

fn rational_json(value: &num_rational::BigRational) -> serde_json::Value {
    json!({ "exact": value.to_string(), "value": value.to_f64() })
}

fn oracle(args: &OracleArgs) -> Result<()> {
    let model = args.model.spec()?;
    let output = match args.functional {
        FunctionalName::TrajProbs => {
            let listing = enumerate_trajectories(&model, args.n)?;
            let total = enumeration_oracle(&model, args.n, &Functional::TrajectoryProbabilities)?;
            json!({
                "model": model.label,
                "n": args.n,
                "functional": "traj-probs",
                "trajectories": listing.iter().map(|(choices, p)| json!({
                    "choices": choices,
                    "probability": rational_json(p),
                })).collect::<Vec<_>>(),
                "total": rational_json(&total),
            })
        }
        FunctionalName::ExpectedS => {
            let (Some(points), Some(width)) = (&args.probes, args.width) else {
                bail!("expected-s needs --probes and --width");
            };
            let plan = ProbePlan::new(points.clone(), width, args.n)?;
            let value = enumeration_oracle(&model, args.n, &Functional::ExpectedStatistic(plan))?;
            json!({ "model": model.label, "n": args.n, "functional": "expected-s", "probes": points, "width": width, "result": rational_json(&value) })
        }
        FunctionalName::Dn => {
            let Some(alt) = &args.m1 else {
                bail!("dn needs --m1");
            };
            let alt = ModelSpec::from_name(alt, args.model.m, args.model.a)?;
            let value = enumeration_oracle(&model, args.n, &Functional::Semimetric(alt.clone()))?;
            json!({ "m0": model.label, "m1": alt.label, "n": args.n, "functional": "dn", "result": rational_json(&value) })
        }
    };
    print_json(&output)
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Generate(args) => generate(args).map(|()| 0),
        Command::Test(args) => test(args),
        Command::Radius(args) => radius(args).map(|()| 0),
        Command::Distance(args) => distance(args).map(|()| 0),
        Command::Experiment(args) => experiment(args).map(|()| 0),
        Command::Oracle(args) => oracle(args).map(|()| 0),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
