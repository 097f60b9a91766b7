//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use dyngof::harness::{
    calibrate_d, enumeration_oracle, run_concentration_experiment, run_success_experiment, tail_exponent_diagnostic,
    ExperimentConfig, ExperimentKind, Functional,
};
use dyngof::rng::stream_rng;
use dyngof::{
    counting_function, dn_estimate, dn_estimate_detailed, fixed_plan_radius_estimate, sample_trajectory,
    test_dynamic_graph, tv_dense, tv_via_counting, AlphaMode, ModelSpec, ProbePlan, TestConfig,
};
use num_traits::ToPrimitive;
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
type CliRun = (Option<i32>, Vec<u8>);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn pa() -> ModelSpec {
    ModelSpec::pref_attach(1).expect("valid model")
}

fn uniform() -> ModelSpec {
    ModelSpec::uniform(1).expect("valid model")
}

fn exact_oracle_agreement() -> Outcome {
    let model = pa();
    let cases = [(3, vec![2, 3], 1), (4, vec![2, 3], 2), (5, vec![2, 3, 4], 2)];
    let mut notes = Vec::new();
    let mut ok = true;
    for (n, points, width) in cases {
        let total = enumeration_oracle(&model, n, &Functional::TrajectoryProbabilities).map_err(err)?;
        let total = total.to_f64().unwrap_or(f64::NAN);
        let plan = ProbePlan::new(points, width, n).map_err(err)?;
        let exact = enumeration_oracle(&model, n, &Functional::ExpectedStatistic(plan.clone())).map_err(err)?;
        let exact = exact.to_f64().unwrap_or(f64::NAN);
        let mc = fixed_plan_radius_estimate(&model, n, &plan, 10_000, 1000 + n as u64).map_err(err)?;
        let dev = (mc.mean - exact).abs();
        let se = mc.std_err();
        let agree = dev <= 3.0 * se || dev < 1e-12;
        ok &= (total - 1.0).abs() <= 1e-10 && agree;
        notes.push(format!("n={n} sum={total} E[S]={exact:.6} mc={:.6} se={se:.2e}", mc.mean));
    }
    check(ok, notes.join("; "))
}

fn tv_equivalence() -> Outcome {
    let mut rng = stream_rng(77, 0);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let dim = rng.gen_range(2..=100);
        // Coarse weights on some pairs so the counting function sees repeated values.
        let levels = if rng.gen_bool(0.5) { 4 } else { 0 };
        let draw = |rng: &mut dyngof::rng::StreamRng| -> Vec<f64> {
            let w: Vec<f64> = (0..dim)
                .map(|_| match levels {
                    0 => rng.gen::<f64>(),
                    k => rng.gen_range(0..k) as f64,
                })
                .collect();
            let total: f64 = w.iter().sum();
            if total == 0.0 {
                vec![1.0 / dim as f64; dim]
            } else {
                w.iter().map(|x| x / total).collect()
            }
        };
        let p = draw(&mut rng);
        let q = draw(&mut rng);
        let dense = tv_dense(&p, &q).map_err(err)?;
        let via = tv_via_counting(&counting_function(&p, &q).map_err(err)?);
        worst = worst.max((dense - via).abs());
    }
    check(worst <= 1e-12, format!("1000 pairs, max |diff| = {worst:.2e}"))
}

fn semimetric_identity() -> Outcome {
    let models = [pa(), uniform(), ModelSpec::affine(1, 1.0).map_err(err)?];
    let mut ok = true;
    let mut notes = Vec::new();
    for model in &models {
        let d = dn_estimate(model, model, 100, 10, 5).map_err(err)?;
        ok &= d == 0.0;
        notes.push(format!("d({0},{0})={d}", model.label));
    }
    let est = dn_estimate_detailed(&pa(), &uniform(), 3, 10_000, 6).map_err(err)?;
    ok &= (est.mean - 0.125).abs() <= 3.0 * est.std_err;
    notes.push(format!("d(pa,uniform,3)={:.5} se={:.1e}", est.mean, est.std_err));
    check(ok, notes.join("; "))
}

fn base_experiment(kind: ExperimentKind, n_values: Vec<usize>, replications: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        experiment: kind,
        null_model: pa(),
        alt_model: uniform(),
        n_values,
        replications,
        test_config: TestConfig::new(pa(), 1.0),
        output_path: String::new(),
        d_per_vertex: None,
        seed,
    }
}

fn concentration() -> Outcome {
    let cfg = base_experiment(ExperimentKind::Concentration, vec![500, 1000, 2000, 4000], 50, 2026);
    let rows = run_concentration_experiment(&cfg).map_err(err)?;
    let decreasing = rows.windows(2).all(|w| w[1].cv < w[0].cv);
    let last = rows.last().ok_or("no rows")?;
    let cvs: Vec<String> = rows.iter().map(|r| format!("{:.4}", r.cv)).collect();
    check(
        decreasing && last.p_exceed_005 == 0.0,
        format!("cv=[{}] P[|S-mean|>0.05n] at 4000 = {}", cvs.join(", "), last.p_exceed_005),
    )
}

fn distinguishability() -> Outcome {
    let cal_cfg = TestConfig::new(pa(), 1.0);
    let cal = calibrate_d(&pa(), &uniform(), 500, 100, &cal_cfg, 31).map_err(err)?;
    let mut cfg = base_experiment(ExperimentKind::SuccessRate, vec![500, 2000], 100, 32);
    cfg.d_per_vertex = Some(cal.d_suggested);
    let rows = run_success_experiment(&cfg).map_err(err)?;
    let (small, large) = (&rows[0], &rows[1]);
    check(
        large.success >= 0.95 && large.success >= small.success - 0.05,
        format!(
            "D/n={:.4}; success n=500: {:.3}, n=2000: {:.3} (acc M0 {:.2}, acc M1 {:.2})",
            cal.d_suggested, small.success, large.success, large.acc_m0, large.acc_m1
        ),
    )
}

fn tail_exponent() -> Outcome {
    let diag = tail_exponent_diagnostic(&pa(), 100_000, 5, 41).map_err(err)?;
    let gamma = diag.fitted_gamma.ok_or("no exponent fitted")?;
    let bins = diag.fit_mask.iter().filter(|&&b| b).count();
    check((-3.5..=-2.5).contains(&gamma), format!("gamma = {gamma:.3} over {bins} bins"))
}

fn run_cli(dir: &Path, args: &[&str]) -> Result<CliRun, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_dyngof"))
        .current_dir(dir)
        .args(args)
        .output()
        .map_err(err)?;
    Ok((out.status.code(), out.stdout))
}

fn read_files(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .map_err(err)?
        .map(|e| {
            let e = e.map_err(err)?;
            Ok((e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).map_err(err)?))
        })
        .collect::<Result<_, String>>()?;
    files.sort();
    Ok(files)
}

/// Runs every command once inside `dir`, returning each command's exit code and stdout.
fn cli_session(dir: &Path) -> Result<Vec<CliRun>, String> {
    let (traj, csv) = ("pa.traj", "success.csv");
    let commands: Vec<Vec<&str>> = vec![
        vec!["generate", "--model", "pa", "--n", "300", "--seed", "11", "--out", traj],
        vec!["generate", "--model", "affine-pa", "--a", "2", "--m", "2", "--n", "150", "--seed", "12"],
        vec!["test", traj, "--model", "pa", "--D", "20", "--seed", "13"],
        vec!["test", traj, "--model", "uniform", "--D", "20", "--alpha", "fixed:90", "--seed", "13"],
        vec!["radius", "--model", "uniform", "--n", "200", "--replications", "8", "--seed", "14"],
        vec!["distance", "--m0", "pa", "--m1", "uniform", "--n", "80", "--replications", "8", "--seed", "15"],
        vec![
            "experiment", "--experiment", "success-rate", "--n-values", "100,200", "--replications", "6",
            "--d-per-vertex", "0.06", "--seed", "16", "--out", csv,
        ],
        vec!["oracle", "--model", "pa", "--n", "4", "--functional", "traj-probs"],
        vec!["oracle", "--model", "pa", "--n", "4", "--functional", "expected-s", "--probes", "2,3", "--width", "2"],
        vec!["oracle", "--model", "pa", "--n", "4", "--functional", "dn", "--m1", "uniform"],
    ];
    commands.iter().map(|args| run_cli(dir, args)).collect()
}

fn cli_determinism() -> Outcome {
    let a = tempfile::tempdir().map_err(err)?;
    let b = tempfile::tempdir().map_err(err)?;
    let run_a = cli_session(a.path())?;
    let run_b = cli_session(b.path())?;
    let failed: Vec<usize> = run_a.iter().enumerate().filter(|(_, r)| r.0.is_none_or(|c| c > 1)).map(|(i, _)| i).collect();
    if !failed.is_empty() {
        return Err(format!("commands {failed:?} errored"));
    }
    let files_a = read_files(a.path())?;
    let files_b = read_files(b.path())?;
    check(
        run_a == run_b && files_a == files_b,
        format!("{} commands, {} output files", run_a.len(), files_a.len()),
    )
}

fn random_model(rng: &mut dyngof::rng::StreamRng, m: usize) -> ModelSpec {
    match rng.gen_range(0..3) {
        0 => ModelSpec::pref_attach(m),
        1 => ModelSpec::uniform(m),
        _ => ModelSpec::affine(m, rng.gen_range(0.1..5.0)),
    }
    .expect("valid model")
}

fn statistic_bounds() -> Outcome {
    let mut rng = stream_rng(88, 0);
    let mut worst = String::new();
    let mut bad = 0usize;
    for case in 0..1000u64 {
        let m = rng.gen_range(1..=3);
        let n = rng.gen_range(4..=200);
        let source = random_model(&mut rng, m);
        let null = random_model(&mut rng, m);
        let traj = sample_trajectory(&source, n, case).map_err(err)?;
        let mut cfg = TestConfig::new(null, rng.gen_range(0.01..50.0));
        cfg.width_fraction = rng.gen_range(0.01..0.5);
        cfg.probe_fraction = rng.gen_range(0.01..1.0);
        cfg.alpha_mode = if rng.gen_bool(0.5) {
            AlphaMode::Fixed { radius: rng.gen_range(0.0..100.0) }
        } else {
            AlphaMode::Sampled { replications: rng.gen_range(2..=4) }
        };
        cfg.seed = rng.gen();
        if cfg.validate(n).is_err() {
            cfg.width_fraction = 1.0 / n as f64;
        }
        let report = test_dynamic_graph(&traj, &cfg).map_err(err)?;
        let m_probes = report.probes.count();
        let ok = m_probes == cfg.probes(n)
            && report.s >= 0.0
            && report.s <= m_probes as f64
            && report.alpha == report.radius_estimate + cfg.d / 2.0
            && report.decision == (report.s > report.alpha);
        if !ok {
            bad += 1;
            worst = format!(" first failure: case {case} n={n} S={} M={m_probes}", report.s);
        }
    }
    check(bad == 0, format!("1000 configs, {bad} violations{worst}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("exact-oracle agreement", exact_oracle_agreement),
        ("TV representation equivalence", tv_equivalence),
        ("semimetric identity", semimetric_identity),
        ("concentration of S", concentration),
        ("distinguishability", distinguishability),
        ("degree tail exponent", tail_exponent),
        ("CLI determinism", cli_determinism),
        ("statistic bounds and threshold arithmetic", statistic_bounds),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {} {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
