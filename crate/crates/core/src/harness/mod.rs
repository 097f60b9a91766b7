//! Monte Carlo experiments around the test.
//!
//! Every experiment is a pure function of its [`ExperimentConfig`] (which
//! carries the master seed). Replications run in parallel on per-replication
//! streams and are aggregated in index order, so tables reproduce bit for bit.

mod calibrate;
mod experiments;
mod oracle;
mod table;
mod tail;

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gof::TestConfig;
use crate::models::ModelSpec;

pub use calibrate::{calibrate_d, Calibration};
pub use experiments::{
    fit_error_decay, run_calibration_experiment, run_concentration_experiment, run_radius_scan,
    run_success_experiment, run_tail_experiment, CalibrationRow, ConcentrationRow, RadiusRow, SuccessRow,
    TailRow, EXCEEDANCE_LEVELS,
};
pub use oracle::{
    enumerate_trajectories, enumeration_oracle, exact_expected_statistic, exact_semimetric, Functional,
};
pub use table::{read_csv, to_csv_string, write_csv};
pub use tail::{tail_exponent_diagnostic, TailDiagnostic, TAIL_BINS_PER_DECADE, TAIL_MIN_DEGREE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    SuccessRate,
    Concentration,
    TailExponent,
    RadiusScan,
    Calibration,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::SuccessRate => "success-rate",
            ExperimentKind::Concentration => "concentration",
            ExperimentKind::TailExponent => "tail-exponent",
            ExperimentKind::RadiusScan => "radius-scan",
            ExperimentKind::Calibration => "calibration",
        }
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            ExperimentKind::SuccessRate,
            ExperimentKind::Concentration,
            ExperimentKind::TailExponent,
            ExperimentKind::RadiusScan,
            ExperimentKind::Calibration,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| Error::InvalidConfig(format!("unknown experiment '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub null_model: ModelSpec,
    pub alt_model: ModelSpec,
    pub n_values: Vec<usize>,
    pub replications: usize,
    pub test_config: TestConfig,
    /// CSV file path, or a directory to receive an auto-named CSV.
    pub output_path: String,
    /// Per-vertex separation rate; when set, the test at horizon `n` uses `D = rate · n`.
    #[serde(default)]
    pub d_per_vertex: Option<f64>,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() || self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig("n_values must be non-empty and increasing".into()));
        }
        if self.replications == 0 {
            return Err(Error::InvalidConfig("replications must be at least 1".into()));
        }
        self.null_model.validate()?;
        self.alt_model.validate()?;
        if let Some(rate) = self.d_per_vertex {
            if !(rate > 0.0 && rate.is_finite()) {
                return Err(Error::InvalidConfig(format!("d_per_vertex must be positive (got {rate})")));
            }
        }
        Ok(())
    }

    /// Separation margin used by the test at horizon `n`.
    pub fn d_at(&self, n: usize) -> f64 {
        self.d_per_vertex.map_or(self.test_config.d, |rate| rate * n as f64)
    }

    /// `<experiment>_<null>_<alt>_<timestamp>.csv`
    pub fn default_file_name(&self, timestamp: u64) -> String {
        format!(
            "{}_{}_{}_{}.csv",
            self.experiment.name(),
            self.null_model.short_name(),
            self.alt_model.short_name(),
            timestamp
        )
    }

    /// Resolves `output_path` to a CSV path (directories get an auto-named file).
    pub fn csv_path(&self, timestamp: u64) -> PathBuf {
        let path = Path::new(&self.output_path);
        if path.extension().is_some_and(|e| e == "csv") {
            path.to_path_buf()
        } else {
            path.join(self.default_file_name(timestamp))
        }
    }
}

/// One experiment's rows.
#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentTable {
    Success(Vec<SuccessRow>),
    Concentration(Vec<ConcentrationRow>),
    Tail(Vec<TailRow>),
    Radius(Vec<RadiusRow>),
    Calibration(Vec<CalibrationRow>),
}

impl ExperimentTable {
    pub fn to_csv(&self) -> Result<String> {
        match self {
            ExperimentTable::Success(rows) => to_csv_string(rows),
            ExperimentTable::Concentration(rows) => to_csv_string(rows),
            ExperimentTable::Tail(rows) => to_csv_string(rows),
            ExperimentTable::Radius(rows) => to_csv_string(rows),
            ExperimentTable::Calibration(rows) => to_csv_string(rows),
        }
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentTable> {
    cfg.validate()?;
    Ok(match cfg.experiment {
        ExperimentKind::SuccessRate => ExperimentTable::Success(run_success_experiment(cfg)?),
        ExperimentKind::Concentration => ExperimentTable::Concentration(run_concentration_experiment(cfg)?),
        ExperimentKind::TailExponent => ExperimentTable::Tail(run_tail_experiment(cfg)?),
        ExperimentKind::RadiusScan => ExperimentTable::Radius(run_radius_scan(cfg)?),
        ExperimentKind::Calibration => ExperimentTable::Calibration(run_calibration_experiment(cfg)?),
    })
}

/// JSON manifest stored next to each CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub config: ExperimentConfig,
    pub seed: u64,
    pub csv: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub csv_path: PathBuf,
    pub manifest_path: PathBuf,
    pub table: ExperimentTable,
}

/// Runs the experiment and writes `<name>.csv` plus `<name>.json`.
pub fn run_and_persist(cfg: &ExperimentConfig, timestamp: u64) -> Result<ExperimentOutput> {
    let table = run_experiment(cfg)?;
    let csv_path = cfg.csv_path(timestamp);
    if let Some(dir) = csv_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(&csv_path, table.to_csv()?)?;
    let manifest_path = csv_path.with_extension("json");
    let manifest = ExperimentManifest {
        config: cfg.clone(),
        seed: cfg.seed,
        csv: csv_path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default(),
    };
    fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(ExperimentOutput {
        csv_path,
        manifest_path,
        table,
    })
}
