//! Exact enumeration for tiny instances.
//!
//! For `m = 1` and `n <= 6` there are at most `5! = 120` trajectories, so
//! expectations can be computed exactly in rational arithmetic. The
//! attachment laws are re-derived here over `BigRational` rather than reusing
//! the floating-point `step_distribution`, which keeps the oracle independent
//! of the code it checks.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::models::{ModelKind, ModelSpec};
use crate::sampling::ProbePlan;

const MAX_N: usize = 6;

/// Quantity whose exact expectation the oracle returns.
#[derive(Debug, Clone, PartialEq)]
pub enum Functional {
    /// Total probability over all trajectories (always 1).
    TrajectoryProbabilities,
    /// `E[S]` under the model, against itself, with a fixed probe plan.
    ExpectedStatistic(ProbePlan),
    /// `d_n(model, alternative)`, averaging over the alternative's states.
    Semimetric(ModelSpec),
}

fn ratio(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact `p_{t+1,·}` given the degree sequence of `G_t` (m = 1).
fn exact_step(model: &ModelSpec, degrees: &[u64]) -> Vec<BigRational> {
    let t = degrees.len() as u64;
    let total: u64 = degrees.iter().sum();
    match model.kind {
        ModelKind::PrefAttach => degrees.iter().map(|&d| ratio(d, total)).collect(),
        ModelKind::UniformAttach => degrees.iter().map(|_| ratio(1, t)).collect(),
        ModelKind::AffinePrefAttach { a } => {
            let a = BigRational::from_float(a).expect("validated finite shift");
            let norm = BigRational::from_integer(BigInt::from(total)) + &a * BigInt::from(t);
            degrees
                .iter()
                .map(|&d| (BigRational::from_integer(BigInt::from(d)) + &a) / &norm)
                .collect()
        }
    }
}

fn check(model: &ModelSpec, n: usize) -> Result<()> {
    model.validate()?;
    if n > MAX_N || model.m != 1 {
        return Err(Error::OracleTooLarge { n, m: model.m });
    }
    if n < 2 {
        return Err(Error::HorizonTooShort { n, min: 2 });
    }
    Ok(())
}

/// Every trajectory of `n` vertices as `(targets of arrivals 2..=n, probability)`.
pub fn enumerate_trajectories(model: &ModelSpec, n: usize) -> Result<Vec<(Vec<u32>, BigRational)>> {
    check(model, n)?;
    let mut out = Vec::new();
    walk(model, n, vec![2], &mut Vec::new(), BigRational::one(), &mut out);
    Ok(out)
}

fn walk(
    model: &ModelSpec,
    n: usize,
    degrees: Vec<u64>,
    prefix: &mut Vec<u32>,
    prob: BigRational,
    out: &mut Vec<(Vec<u32>, BigRational)>,
) {
    if degrees.len() == n {
        out.push((prefix.clone(), prob));
        return;
    }
    for (i, p) in exact_step(model, &degrees).into_iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        let mut next = degrees.clone();
        next[i] += 1;
        next.push(1);
        prefix.push(i as u32 + 1);
        walk(model, n, next, prefix, &prob * p, out);
        prefix.pop();
    }
}

fn degrees_before(choices: &[u32], t: usize) -> Vec<u64> {
    // Degrees of G_t.
    let mut deg = vec![2u64];
    for &c in &choices[..t - 1] {
        deg[c as usize - 1] += 1;
        deg.push(1);
    }
    deg
}

fn exact_statistic(model: &ModelSpec, choices: &[u32], plan: &ProbePlan) -> BigRational {
    let half = ratio(1, 2);
    let mut s = BigRational::zero();
    for &r in plan.points() {
        let p = exact_step(model, &degrees_before(choices, r - 1));
        let mut counts = vec![0u64; r - 1];
        let mut denom = 0u64;
        for h in r..r + plan.width() {
            let v = choices[h - 2] as usize;
            if v < r {
                counts[v - 1] += 1;
                denom += 1;
            }
        }
        if denom == 0 {
            s += BigRational::one();
            continue;
        }
        let tv: BigRational = counts
            .iter()
            .zip(&p)
            .map(|(&c, pv)| (ratio(c, denom) - pv).abs())
            .fold(BigRational::zero(), |acc, x| acc + x);
        s += tv * &half;
    }
    s
}

/// Exact `E[S]` for trajectories of `model` tested against `model` with a fixed plan.
pub fn exact_expected_statistic(model: &ModelSpec, n: usize, plan: &ProbePlan) -> Result<BigRational> {
    if !plan.fits(n) {
        return Err(Error::WindowExceedsHorizon {
            t: *plan.points().last().unwrap_or(&0),
            width: plan.width(),
            n,
        });
    }
    Ok(enumerate_trajectories(model, n)?
        .iter()
        .map(|(choices, prob)| prob * exact_statistic(model, choices, plan))
        .fold(BigRational::zero(), |acc, x| acc + x))
}

/// Exact `d_n(m0, m1)` with states drawn from `m1`.
pub fn exact_semimetric(m0: &ModelSpec, m1: &ModelSpec, n: usize) -> Result<BigRational> {
    check(m0, n)?;
    check(m1, n)?;
    let half = ratio(1, 2);
    let mut total = BigRational::zero();
    for j in 1..n {
        // States of M1 at time j: trajectories of j vertices (G_1 alone when j = 1).
        let states = if j == 1 {
            vec![(Vec::new(), BigRational::one())]
        } else {
            enumerate_trajectories(m1, j)?
        };
        for (choices, prob) in states {
            let deg = degrees_before(&choices, j);
            let tv = exact_step(m0, &deg)
                .iter()
                .zip(exact_step(m1, &deg))
                .map(|(a, b)| (a - b).abs())
                .fold(BigRational::zero(), |acc, x| acc + x);
            total += prob * tv * &half;
        }
    }
    Ok(total * half)
}

/// Exact expectation of `functional` over all trajectories of `model`.
pub fn enumeration_oracle(model: &ModelSpec, n: usize, functional: &Functional) -> Result<BigRational> {
    match functional {
        Functional::TrajectoryProbabilities => Ok(enumerate_trajectories(model, n)?
            .into_iter()
            .fold(BigRational::zero(), |acc, (_, p)| acc + p)),
        Functional::ExpectedStatistic(plan) => exact_expected_statistic(model, n, plan),
        Functional::Semimetric(alt) => exact_semimetric(model, alt, n),
    }
}
