//! Tail of the conditional-probability spectrum.
//!
//! `N_t(q)` is the number of vertices `v` with `p_{t,v} = q`. For degree-based
//! models `q` lives on a lattice `(k + a)·δ` (integer degree `k`, shift `a`,
//! spacing `δ`), so a bin's count is divided by the number of lattice values
//! it contains to estimate `E[N_t(q)]` per value before fitting the slope.

use rayon::prelude::*;

use super::experiments::least_squares_slope;
use crate::error::{Error, Result};
use crate::models::{replay, sample_trajectory, step_distribution, ModelKind, ModelSpec};
use crate::rng::derive_seed;

pub const TAIL_BINS_PER_DECADE: f64 = 10.0;
/// Smallest degree included in the fit.
pub const TAIL_MIN_DEGREE: f64 = 10.0;
const MIN_FIT_BINS: usize = 5;
const EDGE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct TailDiagnostic {
    pub t: usize,
    /// Log-spaced bin edges; bin `i` is `[q_bins[i], q_bins[i + 1])`.
    pub q_bins: Vec<f64>,
    /// Mean number of vertices per bin over replications.
    pub counts: Vec<f64>,
    /// Mean `N_t(q)` per lattice value in each bin.
    pub density: Vec<f64>,
    /// Bins used by the slope fit.
    pub fit_mask: Vec<bool>,
    /// Fitted exponent; `None` when the spectrum is a single point.
    pub fitted_gamma: Option<f64>,
    pub degenerate: bool,
}

/// Histograms `p_{t,·}` at `t = n` over `replications` trajectories and fits
/// `log E[N_t(q)] ~ γ log q` over `q >= 10 δ`.
pub fn tail_exponent_diagnostic(model: &ModelSpec, n: usize, replications: usize, seed: u64) -> Result<TailDiagnostic> {
    if n < 1000 {
        return Err(Error::HorizonTooShort { n, min: 1000 });
    }
    if replications == 0 {
        return Err(Error::InvalidConfig("tail diagnostic needs at least 1 replication".into()));
    }
    let spectra = (0..replications)
        .into_par_iter()
        .map(|i| {
            let traj = sample_trajectory(model, n, derive_seed(seed, i as u64))?;
            Ok(step_distribution(model, &replay(&traj, n - 1)?)?.mass)
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;

    let (lo, hi) = spectra
        .iter()
        .flatten()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &q| (lo.min(q), hi.max(q)));
    if hi <= lo * (1.0 + EDGE_EPS) {
        return Ok(TailDiagnostic {
            t: n,
            q_bins: vec![lo, hi],
            counts: vec![(n - 1) as f64],
            density: vec![(n - 1) as f64],
            fit_mask: vec![false],
            fitted_gamma: None,
            degenerate: true,
        });
    }

    // Lattice spacing and offset of the attainable q values.
    let (spacing, offset) = match model.kind {
        ModelKind::AffinePrefAttach { a } => (model.mass_per_degree(n - 1), a),
        _ => (model.mass_per_degree(n - 1), 0.0),
    };
    let anchor = spacing.map_or(lo, |d| (TAIL_MIN_DEGREE + offset) * d);
    let bin_of = |q: f64| ((q / anchor).log10() * TAIL_BINS_PER_DECADE + EDGE_EPS).floor() as i64;
    let first = bin_of(lo);
    let last = bin_of(hi);
    let nbins = (last - first + 1) as usize;
    let q_bins: Vec<f64> = (0..=nbins)
        .map(|i| anchor * 10f64.powf((first + i as i64) as f64 / TAIL_BINS_PER_DECADE))
        .collect();

    let mut counts = vec![0.0; nbins];
    for q in spectra.iter().flatten() {
        counts[(bin_of(*q) - first) as usize] += 1.0;
    }
    for c in &mut counts {
        *c /= replications as f64;
    }
    let density: Vec<f64> = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| match spacing {
            Some(d) => {
                let k_lo = (q_bins[i] / d - offset - EDGE_EPS).ceil();
                let k_hi = (q_bins[i + 1] / d - offset - EDGE_EPS).ceil();
                c / (k_hi - k_lo).max(1.0)
            }
            None => c,
        })
        .collect();
    let fit_mask: Vec<bool> = (0..nbins)
        .map(|i| first + i as i64 >= 0 && counts[i] > 0.0)
        .collect();
    let pts: Vec<(f64, f64)> = (0..nbins)
        .filter(|&i| fit_mask[i])
        .map(|i| ((q_bins[i] * q_bins[i + 1]).sqrt().ln(), density[i].ln()))
        .collect();
    if pts.len() < MIN_FIT_BINS {
        return Err(Error::InsufficientTail { populated: pts.len() });
    }
    Ok(TailDiagnostic {
        t: n,
        q_bins,
        counts,
        density,
        fit_mask,
        fitted_gamma: least_squares_slope(&pts),
        degenerate: false,
    })
}
