//! Goodness-of-fit testing for growing random graph models.
//!
//! A trajectory of a growing graph is summarised by its attachment choices.
//! Given one observed trajectory and a null model (linear preferential
//! attachment by default), the test compares short windows of observed
//! attachments against the null model's conditional attachment distribution
//! at randomly chosen probe times, sums the total variation distances into a
//! statistic `S`, and rejects the null when `S` exceeds the null's own
//! expected value plus a margin `D/2`.
//!
//! Modules:
//! - [`models`]: growth models, degree state, trajectory sampling and file format.
//! - [`sampling`]: probe plans, windowed empirical measures, total variation.
//! - [`gof`]: the test statistic, sampling radius, semimetric and the decision rule.
//! - [`harness`]: Monte Carlo experiments, tail diagnostics and an exact oracle.

pub mod error;
pub mod gof;
pub mod harness;
pub mod models;
pub mod rng;
pub mod sampling;

pub use error::{Error, Result};
pub use gof::{
    dn_estimate, dn_estimate_detailed, fixed_plan_radius_estimate, sampling_radius_estimate,
    test_dynamic_graph, test_statistic, AlphaMode, DnEstimate, RadiusEstimate, StatisticValue,
    TestConfig, TestReport,
};
pub use models::{
    replay, sample_trajectory, step_distribution, DegreeState, ModelKind, ModelSpec, ProbVector,
    Trajectory,
};
pub use sampling::{
    counting_function, empirical_measure, sample_probe_points, tv_dense, tv_distance,
    tv_via_counting, CountingFunction, EmpiricalMeasure, ProbePlan,
};
