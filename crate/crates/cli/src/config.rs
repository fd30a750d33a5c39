//! Experiment configuration: one TOML file with a section per subcommand.
//!
//! Every field has a default, so an empty file is a valid configuration.

use crate::error::{CliError, Result};
use gibbs_core::free_energy::{validate_scaling, ParameterMode};
use gibbs_core::semiclassics::ConvexFunction;
use gibbs_core::spectral::{ModeSet, PotentialFamily, PotentialSpec, LEBESGUE_VOLUME, UNIT_VOLUME};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Torus volume, either by name or as a positive number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VolumeSpec {
    /// `"unit"` (1) or `"lebesgue"` (4π²).
    Named(String),
    Value(f64),
}

impl Default for VolumeSpec {
    fn default() -> Self {
        Self::Named("unit".into())
    }
}

impl VolumeSpec {
    pub fn resolve(&self) -> Result<f64> {
        match self {
            Self::Named(name) => match name.as_str() {
                "unit" => Ok(UNIT_VOLUME),
                "lebesgue" => Ok(LEBESGUE_VOLUME),
                other => Err(CliError::Config(format!(
                    "unknown volume {other:?}; expected \"unit\", \"lebesgue\" or a positive number"
                ))),
            },
            Self::Value(v) if *v > 0.0 && v.is_finite() => Ok(*v),
            Self::Value(v) => Err(CliError::Config(format!("volume must be positive, got {v}"))),
        }
    }
}

/// Projected mode set: the explicit list when given, else `|k|² + 1 ≤ cutoff`.
pub fn build_modes(cutoff: f64, modes: &Option<Vec<[i64; 2]>>) -> Result<ModeSet> {
    Ok(match modes {
        Some(list) => ModeSet::from_modes(list.clone())?,
        None => ModeSet::new(cutoff)?,
    })
}

/// Growth policy for the Fock truncation `n_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FockPolicy {
    pub n_start: usize,
    /// `n_max` grows until the Gibbs state puts less than this on the top shell.
    pub top_shell_tolerance: f64,
    /// Largest admissible Fock dimension.
    pub dimension_cap: usize,
}

impl Default for FockPolicy {
    fn default() -> Self {
        Self { n_start: 8, top_shell_tolerance: 1e-6, dimension_cap: 8000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompareConfig {
    /// Keep `k` with `|k|² + 1 ≤ cutoff`.
    pub cutoff: f64,
    /// Explicit mode list; overrides `cutoff` when present.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modes: Option<Vec<[i64; 2]>>,
    pub lambdas: Vec<f64>,
    /// Range exponent: `ε = λ^η`.
    pub eta: f64,
    /// `false` switches the interaction off on both sides.
    pub interaction: bool,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self { cutoff: 1.0, modes: None, lambdas: vec![0.5, 0.3, 0.2, 0.1], eta: 0.04, interaction: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    pub lambdas: Vec<f64>,
    pub eta: f64,
    /// Cutoff exponent: `Λ = λ^{-ν}`.
    pub nu: f64,
    /// Cutoff of the local-quartic reference measure.
    pub reference_cutoff: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self { lambdas: vec![0.5, 0.3, 0.2, 0.1, 0.05], eta: 0.04, nu: 0.33, reference_cutoff: 60.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HusimiConfig {
    /// Keep `k` with `|k|² + 1 ≤ cutoff`.
    pub cutoff: f64,
    /// Explicit mode list; overrides `cutoff` when present.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modes: Option<Vec<[i64; 2]>>,
    pub lambdas: Vec<f64>,
    pub n_max: usize,
    pub n_points: usize,
    /// Relative tolerance on top of the analytic truncation defect.
    pub relative_tolerance: f64,
}

impl Default for HusimiConfig {
    fn default() -> Self {
        Self { cutoff: 1.0, modes: None, lambdas: vec![1.0, 0.3], n_max: 40, n_points: 20, relative_tolerance: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeFinettiConfig {
    /// Keep `k` with `|k|² + 1 ≤ cutoff`.
    pub cutoff: f64,
    /// Explicit mode list; overrides `cutoff` when present.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modes: Option<Vec<[i64; 2]>>,
    pub lambda: f64,
    pub n_max: usize,
    pub orders: Vec<usize>,
    /// `false` uses the free Gibbs state.
    pub interacting: bool,
    /// Range of the interaction in the Gibbs state.
    pub epsilon: f64,
    /// Acceptance threshold for the moment residual, in standard errors.
    pub sigmas: f64,
}

impl Default for DeFinettiConfig {
    fn default() -> Self {
        Self {
            cutoff: 1.0,
            modes: None,
            lambda: 0.5,
            n_max: 40,
            orders: vec![1, 2],
            interacting: true,
            epsilon: 0.5,
            sigmas: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BerezinConfig {
    pub n_max: usize,
    /// Inverse temperature of the single-mode Gibbs state tested by the first inequality.
    pub lambda: f64,
    /// `false` uses the free Gibbs state.
    pub interacting: bool,
    /// Range of its interaction.
    pub epsilon: f64,
    /// Semiclassical parameter and per-mode variance of the Gaussian upper symbol
    /// tested by the second inequality.
    pub symbol_lambda: f64,
    pub symbol_variance: f64,
    pub functions: Vec<ConvexFunction>,
    /// Admissible negative margin.
    pub margin_tolerance: f64,
}

impl Default for BerezinConfig {
    fn default() -> Self {
        Self {
            n_max: 60,
            lambda: 0.5,
            interacting: true,
            epsilon: 0.5,
            symbol_lambda: 0.5,
            symbol_variance: 0.8,
            functions: vec![ConvexFunction::XLogX, ConvexFunction::Square, ConvexFunction::AbsShift(0.2)],
            margin_tolerance: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub volume: VolumeSpec,
    pub potential: PotentialFamily,
    pub seed: u64,
    pub n_samples: usize,
    pub mode: ParameterMode,
    pub output_dir: PathBuf,
    pub fock: FockPolicy,
    pub compare: CompareConfig,
    pub scan: ScanConfig,
    pub husimi: HusimiConfig,
    pub definetti: DeFinettiConfig,
    pub berezin: BerezinConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            volume: VolumeSpec::default(),
            potential: PotentialFamily::Gaussian { width: 1.0 },
            seed: 2024,
            n_samples: 20_000,
            mode: ParameterMode::Theorem,
            output_dir: PathBuf::from("runs"),
            fock: FockPolicy::default(),
            compare: CompareConfig::default(),
            scan: ScanConfig::default(),
            husimi: HusimiConfig::default(),
            definetti: DeFinettiConfig::default(),
            berezin: BerezinConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("invalid configuration: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("configuration serializes")
    }

    pub fn volume(&self) -> Result<f64> {
        self.volume.resolve()
    }

    /// Potential at range `epsilon`, validated.
    pub fn potential_at(&self, epsilon: f64) -> Result<PotentialSpec> {
        let p = PotentialSpec::new(self.potential, epsilon);
        p.validate()?;
        Ok(p)
    }

    /// Range exponent check for runs with a fixed cutoff: only `0 < η < 1/24` applies.
    pub fn check_eta(&self, eta: f64) -> Result<Vec<String>> {
        let ok = eta > 0.0 && eta < 1.0 / 24.0;
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(CliError::Config(format!("η must be positive, got {eta}")));
        }
        match (ok, self.mode) {
            (true, _) => Ok(Vec::new()),
            (false, ParameterMode::Theorem) => Err(CliError::Config(format!("η = {eta} violates 0 < η < 1/24"))),
            (false, ParameterMode::Exploratory) => Ok(vec![format!("η = {eta} violates 0 < η < 1/24")]),
        }
    }

    /// Full `(η, ν)` check for joint-limit scans.
    pub fn check_scaling(&self) -> Result<Vec<String>> {
        Ok(validate_scaling(self.scan.eta, self.scan.nu, self.mode)?)
    }
}

/// Reject an empty or non-positive list of inverse temperatures.
pub fn check_lambdas(lambdas: &[f64], upper: f64) -> Result<()> {
    if lambdas.is_empty() {
        return Err(CliError::Config("λ list is empty".into()));
    }
    if let Some(bad) = lambdas.iter().find(|&&l| !(l > 0.0 && l <= upper)) {
        return Err(CliError::Config(format!("λ = {bad} must lie in (0, {upper}]")));
    }
    Ok(())
}
