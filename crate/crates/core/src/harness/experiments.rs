use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::calibrate::calibrate_d;
use super::tail::tail_exponent_diagnostic;
use super::ExperimentConfig;
use crate::error::{Error, Result};
use crate::gof::{
    mean_std, sampling_radius_estimate, statistic_samples, test_dynamic_graph, AlphaMode, PlanSource, TestConfig,
};
use crate::models::sample_trajectory;
use crate::rng::derive_seed;

/// Deviation levels `c` in `P[|S − E S| > c·n]`.
pub const EXCEEDANCE_LEVELS: [f64; 3] = [0.01, 0.02, 0.05];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuccessRow {
    pub n: usize,
    #[serde(rename = "acc_M0")]
    pub acc_m0: f64,
    #[serde(rename = "acc_M1")]
    pub acc_m1: f64,
    pub success: f64,
    #[serde(rename = "mean_S_M0")]
    pub mean_s_m0: f64,
    #[serde(rename = "mean_S_M1")]
    pub mean_s_m1: f64,
    pub alpha: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub radius_std: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationRow {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub cv: f64,
    pub p_exceed_001: f64,
    pub p_exceed_002: f64,
    pub p_exceed_005: f64,
}

impl ConcentrationRow {
    pub fn exceedances(&self) -> [f64; 3] {
        [self.p_exceed_001, self.p_exceed_002, self.p_exceed_005]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailRow {
    pub n: usize,
    pub q_lo: f64,
    pub q_hi: f64,
    pub count: f64,
    pub density: f64,
    pub in_fit: bool,
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusRow {
    pub n: usize,
    pub m0_mean: f64,
    pub m0_std: f64,
    pub m1_mean: f64,
    pub m1_std: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRow {
    pub n: usize,
    #[serde(rename = "D_suggested")]
    pub d_suggested: f64,
    #[serde(rename = "mean_S_M0")]
    pub mean_s_m0: f64,
    #[serde(rename = "mean_S_M1_against_M0")]
    pub cross_mean: f64,
    pub radius_m1: f64,
    pub dn: f64,
    pub alpha: f64,
}

fn horizon_seed(cfg: &ExperimentConfig, n: usize) -> u64 {
    derive_seed(cfg.seed, n as u64)
}

fn test_config_at(cfg: &ExperimentConfig, n: usize) -> TestConfig {
    TestConfig {
        null_model: cfg.null_model.clone(),
        d: cfg.d_at(n),
        ..cfg.test_config.clone()
    }
}

/// Accuracy of the test under each hypothesis, per horizon.
///
/// The threshold's radius is estimated once per horizon and then held fixed
/// for all replications at that horizon.
pub fn run_success_experiment(cfg: &ExperimentConfig) -> Result<Vec<SuccessRow>> {
    if cfg.null_model == cfg.alt_model {
        return Err(Error::DegenerateExperiment);
    }
    cfg.n_values
        .iter()
        .map(|&n| {
            let seed_n = horizon_seed(cfg, n);
            let base = test_config_at(cfg, n);
            base.validate(n)?;
            let (radius, radius_std) = match base.alpha_mode {
                AlphaMode::Sampled { replications } => {
                    let est = sampling_radius_estimate(&cfg.null_model, n, &base, replications, derive_seed(seed_n, 0))?;
                    (est.mean, est.std)
                }
                AlphaMode::Fixed { radius } => (radius, 0.0),
            };
            let outcomes = (0..cfg.replications)
                .into_par_iter()
                .map(|i| {
                    let run = |model, tag: u64| -> Result<(bool, f64)> {
                        let s = derive_seed(seed_n, tag);
                        let traj = sample_trajectory(model, n, s)?;
                        let tc = TestConfig {
                            alpha_mode: AlphaMode::Fixed { radius },
                            seed: derive_seed(s, 1),
                            ..base.clone()
                        };
                        let report = test_dynamic_graph(&traj, &tc)?;
                        Ok((report.decision, report.s))
                    };
                    let i = i as u64;
                    Ok((run(&cfg.null_model, 1 + 2 * i)?, run(&cfg.alt_model, 2 + 2 * i)?))
                })
                .collect::<Result<Vec<_>>>()?;
            let k = outcomes.len() as f64;
            let acc_m0 = outcomes.iter().filter(|(h0, _)| !h0.0).count() as f64 / k;
            let acc_m1 = outcomes.iter().filter(|(_, h1)| h1.0).count() as f64 / k;
            Ok(SuccessRow {
                n,
                acc_m0,
                acc_m1,
                success: 0.5 * (acc_m0 + acc_m1),
                mean_s_m0: outcomes.iter().map(|(h0, _)| h0.1).sum::<f64>() / k,
                mean_s_m1: outcomes.iter().map(|(_, h1)| h1.1).sum::<f64>() / k,
                alpha: radius + base.d / 2.0,
                d: base.d,
                radius_std,
            })
        })
        .collect()
}

/// Slope of `log(1 − success)` against `log n` over rows with errors, if at least two.
pub fn fit_error_decay(rows: &[SuccessRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.success < 1.0)
        .map(|r| ((r.n as f64).ln(), (1.0 - r.success).ln()))
        .collect();
    least_squares_slope(&pts)
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Spread of `S_{M0}` under `M0` as the horizon grows.
pub fn run_concentration_experiment(cfg: &ExperimentConfig) -> Result<Vec<ConcentrationRow>> {
    if cfg.replications < 10 {
        return Err(Error::InvalidConfig("concentration needs at least 10 replications".into()));
    }
    cfg.n_values
        .iter()
        .map(|&n| {
            let tc = test_config_at(cfg, n);
            tc.validate(n)?;
            let plans = PlanSource::Random {
                count: tc.probes(n),
                width: tc.width(n),
            };
            let samples = statistic_samples(&cfg.null_model, &cfg.null_model, n, &plans, cfg.replications, horizon_seed(cfg, n))?;
            let (mean, std) = mean_std(&samples);
            let exceed = |c: f64| {
                samples.iter().filter(|&&s| (s - mean).abs() > c * n as f64).count() as f64 / samples.len() as f64
            };
            Ok(ConcentrationRow {
                n,
                mean,
                std,
                cv: std / mean,
                p_exceed_001: exceed(EXCEEDANCE_LEVELS[0]),
                p_exceed_002: exceed(EXCEEDANCE_LEVELS[1]),
                p_exceed_005: exceed(EXCEEDANCE_LEVELS[2]),
            })
        })
        .collect()
}

pub fn run_tail_experiment(cfg: &ExperimentConfig) -> Result<Vec<TailRow>> {
    let mut rows = Vec::new();
    for &n in &cfg.n_values {
        let diag = tail_exponent_diagnostic(&cfg.null_model, n, cfg.replications, horizon_seed(cfg, n))?;
        for (i, (&count, &density)) in diag.counts.iter().zip(&diag.density).enumerate() {
            rows.push(TailRow {
                n,
                q_lo: diag.q_bins[i],
                q_hi: diag.q_bins[i + 1],
                count,
                density,
                in_fit: diag.fit_mask[i],
                gamma: diag.fitted_gamma,
            });
        }
    }
    Ok(rows)
}

pub fn run_radius_scan(cfg: &ExperimentConfig) -> Result<Vec<RadiusRow>> {
    cfg.n_values
        .iter()
        .map(|&n| {
            let tc = test_config_at(cfg, n);
            tc.validate(n)?;
            let seed_n = horizon_seed(cfg, n);
            let r0 = sampling_radius_estimate(&cfg.null_model, n, &tc, cfg.replications, seed_n)?;
            let r1 = sampling_radius_estimate(&cfg.alt_model, n, &tc, cfg.replications, seed_n)?;
            Ok(RadiusRow {
                n,
                m0_mean: r0.mean,
                m0_std: r0.std,
                m1_mean: r1.mean,
                m1_std: r1.std,
            })
        })
        .collect()
}

pub fn run_calibration_experiment(cfg: &ExperimentConfig) -> Result<Vec<CalibrationRow>> {
    cfg.n_values
        .iter()
        .map(|&n| {
            let tc = test_config_at(cfg, n);
            tc.validate(n)?;
            let cal = calibrate_d(&cfg.null_model, &cfg.alt_model, n, cfg.replications, &tc, horizon_seed(cfg, n))?;
            Ok(CalibrationRow {
                n,
                d_suggested: cal.d_suggested,
                mean_s_m0: cal.radius_m0.mean,
                cross_mean: cal.cross.mean,
                radius_m1: cal.radius_m1.mean,
                dn: cal.dn,
                alpha: cal.alpha(),
            })
        })
        .collect()
}
