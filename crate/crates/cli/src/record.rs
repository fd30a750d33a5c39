//! Persisted run results: a schema-versioned JSON document with full provenance
//! and a CSV file with fixed columns (documented in `docs/csv.md` at the repository root).

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

pub const SCHEMA_VERSION: u32 = 1;

/// One point of a free-energy comparison or scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub lambda: f64,
    pub epsilon: f64,
    pub cutoff: f64,
    pub modes: usize,
    /// Fock truncation used on the quantum side.
    pub n_max: Option<usize>,
    /// `-log Z_P/Z₀,P`.
    pub quantum: Option<f64>,
    /// `-log ∫ e^{-W^ε_K} dμ₀,K` by importance sampling.
    pub classical: f64,
    pub classical_std_error: f64,
    /// Deterministic quadrature of the same integral, available for one mode.
    pub classical_oracle: Option<f64>,
    /// `-log ∫ e^{-V_K} dμ₀,K` at the reference cutoff (scans only).
    pub reference: Option<f64>,
    pub reference_std_error: Option<f64>,
    pub gap: f64,
    pub gap_std_error: f64,
    pub top_shell_mass: Option<f64>,
    pub ess: f64,
    pub heavy_tail: bool,
    pub tau: f64,
    pub e_const: f64,
    /// `‖I^ε_K‖_{L²(μ₀,K)}`.
    pub cross_norm: f64,
}

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    /// The checked quantity (residual, margin, drift, …).
    pub value: f64,
    /// The threshold it is compared against.
    pub bound: f64,
    pub detail: String,
}

impl CheckRecord {
    pub fn new(
        suite: &str,
        name: impl Into<String>,
        passed: bool,
        value: f64,
        bound: f64,
        detail: impl Into<String>,
    ) -> Self {
        Self { suite: suite.into(), name: name.into(), passed, value, bound, detail: detail.into() }
    }

    /// Passes when `value ≤ bound`.
    pub fn at_most(suite: &str, name: impl Into<String>, value: f64, bound: f64, detail: impl Into<String>) -> Self {
        Self::new(suite, name, value <= bound, value, bound, detail)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub schema_version: u32,
    pub command: String,
    pub code_version: String,
    pub started_unix_s: u64,
    pub finished_unix_s: u64,
    pub config: ExperimentConfig,
    pub records: Vec<PointRecord>,
    pub checks: Vec<CheckRecord>,
    pub warnings: Vec<String>,
}

pub fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

impl RunResult {
    pub fn new(command: &str, config: &ExperimentConfig) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            code_version: env!("CARGO_PKG_VERSION").into(),
            started_unix_s: unix_now(),
            finished_unix_s: 0,
            config: config.clone(),
            records: Vec::new(),
            checks: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn finish(mut self) -> Self {
        self.finished_unix_s = unix_now();
        self
    }

    pub fn failed_checks(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    /// Read a run record, reporting the position of any syntax or schema error.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let run: Self = serde_json::from_str(&text).map_err(|e| {
            let full = e.to_string();
            let position = format!(" at line {} column {}", e.line(), e.column());
            CliError::Parse {
                path: path.to_path_buf(),
                line: e.line(),
                column: e.column(),
                message: full.strip_suffix(&position).unwrap_or(&full).to_string(),
            }
        })?;
        if run.schema_version != SCHEMA_VERSION {
            return Err(CliError::Parse {
                path: path.to_path_buf(),
                line: 1,
                column: 1,
                message: format!("schema version {} is not {SCHEMA_VERSION}", run.schema_version),
            });
        }
        Ok(run)
    }

    /// Write `<command>.json`, `<command>.csv` and the configuration snapshot
    /// `<command>.config.toml` into `dir`; returns the written paths.
    pub fn persist(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let json = dir.join(format!("{}.json", self.command));
        let text = serde_json::to_string_pretty(self).expect("run result serializes");
        std::fs::write(&json, text + "\n").map_err(|e| CliError::io(&json, e))?;
        let csv = dir.join(format!("{}.csv", self.command));
        let mut file = std::fs::File::create(&csv).map_err(|e| CliError::io(&csv, e))?;
        if self.records.is_empty() {
            write_checks_csv(&self.checks, &mut file)?;
        } else {
            write_points_csv(&self.records, &mut file)?;
        }
        file.flush().map_err(|e| CliError::io(&csv, e))?;
        let snapshot = dir.join(format!("{}.config.toml", self.command));
        std::fs::write(&snapshot, self.config.to_toml()).map_err(|e| CliError::io(&snapshot, e))?;
        Ok(vec![json, csv, snapshot])
    }
}

pub const POINT_COLUMNS: [&str; 21] = [
    "lambda",
    "epsilon",
    "cutoff",
    "modes",
    "n_max",
    "quantum",
    "classical",
    "classical_std_error",
    "classical_oracle",
    "reference",
    "reference_std_error",
    "gap",
    "gap_std_error",
    "top_shell_mass",
    "ess",
    "heavy_tail",
    "tau",
    "e_const",
    "cross_norm",
    "tau_over_log_eps",
    "e_over_log_eps_sq",
];

pub const CHECK_COLUMNS: [&str; 6] = ["suite", "name", "passed", "value", "bound", "detail"];

/// Shortest round-trip decimal representation; empty when absent.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn opt<T: std::fmt::Debug>(x: Option<T>) -> String {
    x.map_or_else(String::new, |v| format!("{v:?}"))
}

pub fn write_points_csv(records: &[PointRecord], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(POINT_COLUMNS)?;
    for r in records {
        let log_eps = r.epsilon.ln().abs();
        w.write_record([
            num(r.lambda),
            num(r.epsilon),
            num(r.cutoff),
            r.modes.to_string(),
            r.n_max.map_or_else(String::new, |n| n.to_string()),
            opt(r.quantum),
            num(r.classical),
            num(r.classical_std_error),
            opt(r.classical_oracle),
            opt(r.reference),
            opt(r.reference_std_error),
            num(r.gap),
            num(r.gap_std_error),
            opt(r.top_shell_mass),
            num(r.ess),
            r.heavy_tail.to_string(),
            num(r.tau),
            num(r.e_const),
            num(r.cross_norm),
            num(r.tau / log_eps),
            num(r.e_const / (log_eps * log_eps)),
        ])?;
    }
    w.flush().map_err(|e| CliError::Csv(e.into()))?;
    Ok(())
}

pub fn write_checks_csv(checks: &[CheckRecord], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CHECK_COLUMNS)?;
    for c in checks {
        w.write_record([
            c.suite.clone(),
            c.name.clone(),
            c.passed.to_string(),
            num(c.value),
            num(c.bound),
            c.detail.clone(),
        ])?;
    }
    w.flush().map_err(|e| CliError::Csv(e.into()))?;
    Ok(())
}
