use std::path::Path;
use std::process::{Command, Output};

fn dyngof(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dyngof"))
        .args(args)
        .output()
        .expect("spawn dyngof")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn generate_to(path: &Path, model: &str, n: usize, seed: u64) {
    let out = dyngof(&[
        "generate",
        "--model",
        model,
        "--n",
        &n.to_string(),
        "--seed",
        &seed.to_string(),
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn generate_two_vertices() {
    let out = dyngof(&["generate", "--model", "pa", "--n", "2", "--seed", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("dyngof-traj v1 n=2 m=1"));
    assert_eq!(lines[1], "1");
}

#[test]
fn generate_is_deterministic() {
    let args = ["generate", "--model", "affine-pa", "--a", "0.5", "--m", "2", "--n", "200", "--seed", "17"];
    let a = dyngof(&args);
    let b = dyngof(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn horizon_of_one_is_rejected() {
    let out = dyngof(&["generate", "--n", "1", "--seed", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn truncated_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.traj");
    generate_to(&path, "pa", 50, 4);
    let text = std::fs::read_to_string(&path).unwrap();
    let cut: Vec<&str> = text.lines().take(20).collect();
    std::fs::write(&path, cut.join("\n")).unwrap();
    let out = dyngof(&["test", path.to_str().unwrap(), "--D", "5", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn distance_to_self_is_zero() {
    let out = dyngof(&["distance", "--m0", "pa", "--m1", "pa", "--n", "60", "--replications", "5", "--seed", "2"]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["dn"].as_f64(), Some(0.0));
}

#[test]
fn oracle_probabilities_sum_to_one() {
    let out = dyngof(&["oracle", "--model", "pa", "--n", "5", "--functional", "traj-probs"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["total"]["exact"], "1");
    assert_eq!(v["trajectories"].as_array().unwrap().len(), 24);
}

#[test]
fn oracle_rejects_large_instances() {
    let out = dyngof(&["oracle", "--n", "12", "--functional", "traj-probs"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn null_trajectory_is_accepted_with_generous_margin() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pa.traj");
    generate_to(&path, "pa", 400, 9);
    let out = dyngof(&["test", path.to_str().unwrap(), "--model", "pa", "--D", "40", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["decision"], 0);
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    for key in ["S", "alpha", "decision", "M", "C", "zero_denom_count", "radius_mean", "radius_std", "seed"] {
        assert!(keys.contains(&key), "missing {key}");
    }
}

#[test]
fn uniform_trajectory_is_rejected_under_pa() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.traj");
    generate_to(&path, "uniform", 2000, 5);
    // 0.06 per vertex is the calibrated rate for pa against uniform.
    let out = dyngof(&["test", path.to_str().unwrap(), "--model", "pa", "--D", "120", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["decision"], 1);
}

#[test]
fn bad_model_name_exits_two() {
    let out = dyngof(&["generate", "--model", "bogus", "--n", "10", "--seed", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn experiment_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("conc.csv");
    let out = dyngof(&[
        "experiment",
        "--experiment",
        "concentration",
        "--n-values",
        "100,200",
        "--replications",
        "10",
        "--seed",
        "1",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["csv"], csv.to_str().unwrap());
    let body = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(body.lines().count(), 3);
    assert!(Path::new(v["manifest"].as_str().unwrap()).exists());
}
