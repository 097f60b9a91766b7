use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gof::{dn_estimate, statistic_samples, PlanSource, RadiusEstimate, TestConfig};
use crate::models::ModelSpec;
use crate::rng::derive_seed;

/// Measured separation between a null and an alternative at one horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub n: usize,
    /// Per-vertex separation `(E_{M1}[S_{M0}] − E_{M0}[S_{M0}]) / n`.
    pub d_suggested: f64,
    /// `E_{M0}[S_{M0}]`.
    pub radius_m0: RadiusEstimate,
    /// `E_{M1}[S_{M1}]`.
    pub radius_m1: RadiusEstimate,
    /// `E_{M1}[S_{M0}]`: the null statistic on alternative trajectories.
    pub cross: RadiusEstimate,
    pub dn: f64,
}

impl Calibration {
    /// Threshold at horizon `n` when the test uses `D = d_suggested · n`.
    pub fn alpha(&self) -> f64 {
        self.radius_m0.mean + self.d_suggested * self.n as f64 / 2.0
    }
}

/// Suggests `D` from the gap between the null statistic's means under both models.
///
/// The null and alternative runs share per-replication seeds, so identical
/// models produce a gap of exactly zero.
pub fn calibrate_d(
    m0: &ModelSpec,
    m1: &ModelSpec,
    n: usize,
    replications: usize,
    cfg: &TestConfig,
    seed: u64,
) -> Result<Calibration> {
    if replications < 10 {
        return Err(Error::InvalidConfig("calibration needs at least 10 replications".into()));
    }
    let plans = PlanSource::Random {
        count: cfg.probes(n),
        width: cfg.width(n),
    };
    let shared = derive_seed(seed, 0);
    let s00 = statistic_samples(m0, m0, n, &plans, replications, shared)?;
    let s10 = statistic_samples(m1, m0, n, &plans, replications, shared)?;
    let s11 = statistic_samples(m1, m1, n, &plans, replications, shared)?;
    let radius_m0 = RadiusEstimate::from_samples(&s00, n)?;
    let cross = RadiusEstimate::from_samples(&s10, n)?;
    let radius_m1 = RadiusEstimate::from_samples(&s11, n)?;
    let gap = cross.mean - radius_m0.mean;
    if gap.is_nan() || gap <= 0.0 {
        return Err(Error::NotSeparated { gap });
    }
    let dn = dn_estimate(m0, m1, n, replications, derive_seed(seed, 1))?;
    Ok(Calibration {
        n,
        d_suggested: gap / n as f64,
        radius_m0,
        radius_m1,
        cross,
        dn,
    })
}
