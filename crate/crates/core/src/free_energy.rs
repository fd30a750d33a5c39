//! Relative classical free energies `-log ∫ e^{-F} dμ₀,K` by importance
//! sampling from the projected free field, and the joint `(K → ∞, ε → 0)` scan.

use crate::error::{Error, Result};
use crate::field::{sample_free_field, Functional, InteractionValues, Interactions};
use crate::quadrature::Composite;
use crate::spectral::{renorm_constants, ModeSet, PotentialSpec, RenormConstants};
use crate::stats::{log_sum_exp, mean_std, KahanSum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Smallest sample count accepted by the estimators.
pub const MIN_SAMPLES: usize = 100;

/// Effective sample size below this fraction of `n` flags a heavy-tailed weight distribution.
pub const ESS_WARNING_FRACTION: f64 = 0.01;

/// Monte Carlo estimate of `-log Z(F)` with `Z(F) = E_{μ₀,K}[e^{-F}]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeEnergyEstimate {
    pub value: f64,
    /// Delta-method standard error of `value`; zero only when every weight is identical.
    pub std_error: f64,
    pub n_samples: usize,
    /// `(Σ w)² / Σ w²`.
    pub ess: f64,
    /// `ess < 0.01 n`.
    pub heavy_tail: bool,
    /// Sample mean of `F`, an upper bound on `value` by Jensen.
    pub mean_functional: f64,
    pub mean_functional_std_error: f64,
}

/// Importance-sampling estimate from functional values `F[u_i]`, `u_i ~ μ₀,K`.
pub fn estimate_from_values(values: &[f64]) -> Result<FreeEnergyEstimate> {
    let n = values.len();
    if n < MIN_SAMPLES {
        return Err(Error::Domain(format!("importance sampling needs at least {MIN_SAMPLES} samples, got {n}")));
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("non-finite functional value {bad}")));
    }
    let shift = values.iter().copied().fold(f64::INFINITY, f64::min);
    // Weights relative to the largest one lie in (0, 1].
    let weights: Vec<f64> = values.iter().map(|v| (shift - v).exp()).collect();
    let (mean_w, std_w) = mean_std(&weights);
    let neg: Vec<f64> = values.iter().map(|v| -v).collect();
    let log_mean = log_sum_exp(&neg) - (n as f64).ln();
    let sum_w: f64 = weights.iter().copied().collect::<KahanSum>().value();
    let sum_w2: f64 = weights.iter().map(|w| w * w).collect::<KahanSum>().value();
    let ess = (sum_w * sum_w / sum_w2).min(n as f64);
    let (mean_f, std_f) = mean_std(values);
    Ok(FreeEnergyEstimate {
        value: -log_mean,
        std_error: std_w / (mean_w * (n as f64).sqrt()),
        n_samples: n,
        ess,
        heavy_tail: ess < ESS_WARNING_FRACTION * n as f64,
        mean_functional: mean_f,
        mean_functional_std_error: std_f / (n as f64).sqrt(),
    })
}

/// Evaluate every functional on samples `0..n` of stream `seed`.
///
/// Samples are evaluated in parallel and returned in index order, so any
/// sequential reduction of the result is independent of the thread count.
pub fn sample_interactions(ev: &Interactions, n_samples: usize, seed: u64) -> Vec<InteractionValues> {
    (0..n_samples as u64).into_par_iter().map(|i| ev.evaluate(&sample_free_field(ev.modes(), seed, i))).collect()
}

pub fn sample_functional(ev: &Interactions, which: Functional, n_samples: usize, seed: u64) -> Vec<f64> {
    (0..n_samples as u64)
        .into_par_iter()
        .map(|i| ev.evaluate(&sample_free_field(ev.modes(), seed, i)).get(which))
        .collect()
}

/// `-log ∫ e^{-F} dμ₀,K` for `F ∈ {W^ε_K, V_K, V^ε_K}`.
pub fn estimate_relative_partition(
    which: Functional,
    m: &ModeSet,
    p: &PotentialSpec,
    rc: &RenormConstants,
    n_samples: usize,
    seed: u64,
) -> Result<FreeEnergyEstimate> {
    if which == Functional::Cross {
        return Err(Error::Unsupported("the cross term is not bounded below; it has no partition function".into()));
    }
    if n_samples < MIN_SAMPLES {
        return Err(Error::Domain(format!(
            "importance sampling needs at least {MIN_SAMPLES} samples, got {n_samples}"
        )));
    }
    let ev = Interactions::with_default_grid(m, p, rc)?;
    estimate_from_values(&sample_functional(&ev, which, n_samples, seed))
}

/// Monte Carlo `L²(μ₀,K)` norm `√E[X²]` with delta-method standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct L2Estimate {
    pub value: f64,
    pub std_error: f64,
}

pub fn l2_norm(values: &[f64]) -> L2Estimate {
    let sq: Vec<f64> = values.iter().map(|v| v * v).collect();
    let (mean, std) = mean_std(&sq);
    let value = mean.sqrt();
    let se_mean = std / (values.len() as f64).sqrt();
    L2Estimate { value, std_error: if value > 0.0 { se_mean / (2.0 * value) } else { 0.0 } }
}

/// `-log ∫_C e^{-F(|α|²)} dμ₀,1(α)` for a single mode with eigenvalue `λ₀`:
/// `|α|²` is exponential with rate `λ₀`, so this is a one-dimensional integral
/// `-log ∫_0^∞ λ₀ e^{-λ₀ s - F(s)} ds`, done by composite Gauss–Legendre.
pub fn single_mode_oracle(lambda0: f64, f: impl Fn(f64) -> f64) -> f64 {
    // Tail beyond s_max carries at most e^{-λ₀ s_max} when F is bounded below by 0-ish
    // constants; 80/λ₀ leaves e^{-80}.
    let s_max = 80.0 / lambda0;
    let rule = Composite::new(0.0, s_max, 4000, 12);
    -(lambda0.ln() + rule.log_integrate_exp(|s| -lambda0 * s - f(s)))
}

/// `W^ε_1` as a function of `s = |α₀|²` for the single mode `k = 0`:
/// `½ V² ŵ(0)(s - c)² - τ V (s - c) - E`.
pub fn single_mode_w(p: &PotentialSpec, rc: &RenormConstants) -> impl Fn(f64) -> f64 {
    let v = rc.volume;
    let w0 = p.w_hat_eps([0, 0]);
    let (c, tau, e) = (rc.c_k, rc.tau, rc.e_const);
    move |s| 0.5 * v * v * w0 * (s - c) * (s - c) - tau * v * (s - c) - e
}

/// `V_1` as a function of `s = |α₀|²`: `½ V (s² - 4cs + 2c²)`.
pub fn single_mode_v(rc: &RenormConstants) -> impl Fn(f64) -> f64 {
    let (v, c) = (rc.volume, rc.c_k);
    move |s| 0.5 * v * (s * s - 4.0 * c * s + 2.0 * c * c)
}

/// How strictly scan parameters are checked against the convergence theorem's hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ParameterMode {
    /// `0 < η < 1/24` and `8η < ν < 1/3` are enforced.
    #[default]
    Theorem,
    /// Any positive `η, ν`; violations become warnings.
    Exploratory,
}

/// Check `(η, ν)`; returns warnings in exploratory mode.
pub fn validate_scaling(eta: f64, nu: f64, mode: ParameterMode) -> Result<Vec<String>> {
    let mut problems = Vec::new();
    if !(eta > 0.0 && eta < 1.0 / 24.0) {
        problems.push(format!("η = {eta} violates 0 < η < 1/24"));
    }
    if !(8.0 * eta < nu && nu < 1.0 / 3.0) {
        problems.push(format!("ν = {nu} violates 8η < ν < 1/3 (8η = {})", 8.0 * eta));
    }
    if !(eta > 0.0 && nu > 0.0 && eta.is_finite() && nu.is_finite()) {
        return Err(Error::Config(format!("η and ν must be positive and finite, got η = {eta}, ν = {nu}")));
    }
    match (mode, problems.is_empty()) {
        (_, true) => Ok(Vec::new()),
        (ParameterMode::Theorem, false) => Err(Error::Config(problems.join("; "))),
        (ParameterMode::Exploratory, false) => Ok(problems),
    }
}

/// Inputs of a joint-limit scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanParams {
    pub eta: f64,
    pub nu: f64,
    /// Strictly decreasing inverse temperatures.
    pub lambdas: Vec<f64>,
    /// Cutoff of the `V_K` reference.
    pub reference_cutoff: f64,
    pub potential: PotentialSpec,
    pub volume: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub mode: ParameterMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub lambda: f64,
    pub epsilon: f64,
    pub cutoff: f64,
    pub modes: usize,
    pub constants: RenormConstants,
    pub w: FreeEnergyEstimate,
    pub reference: FreeEnergyEstimate,
    pub gap: f64,
    pub gap_std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanOutput {
    pub points: Vec<ScanPoint>,
    pub warnings: Vec<String>,
}

/// For each `λ`: `ε = λ^η`, `Λ = λ^{-ν}`, estimate `-log Z(W^ε_K)`, and compare with
/// `-log Z(V_K)` at the fixed reference cutoff. Points run sequentially so only one
/// evaluation grid is alive at a time.
pub fn joint_limit_scan(params: &ScanParams) -> Result<ScanOutput> {
    let mut warnings = validate_scaling(params.eta, params.nu, params.mode)?;
    if params.lambdas.is_empty() {
        return Err(Error::Config("λ list is empty".into()));
    }
    if params.lambdas.iter().any(|&l| !(l > 0.0 && l < 1.0)) {
        return Err(Error::Config("every λ must lie in (0, 1)".into()));
    }
    if params.lambdas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Config("λ list must be strictly decreasing".into()));
    }
    let ref_modes = ModeSet::new(params.reference_cutoff)?;
    // V_K does not involve ε or λ; any ε gives the same c_K.
    let ref_rc = renorm_constants(&ref_modes, &params.potential, params.lambdas[0], params.volume)?;
    let ref_ev = Interactions::with_default_grid(&ref_modes, &params.potential, &ref_rc)?;
    let reference = estimate_from_values(&sample_functional(&ref_ev, Functional::V, params.n_samples, params.seed))?;
    drop(ref_ev);
    if reference.heavy_tail {
        warnings.push(format!("reference V_K estimate has ess {:.1} (heavy tail)", reference.ess));
    }

    let mut points = Vec::with_capacity(params.lambdas.len());
    for &lambda in &params.lambdas {
        let epsilon = lambda.powf(params.eta);
        let cutoff = lambda.powf(-params.nu);
        let m = ModeSet::new(cutoff)?;
        let p = params.potential.with_epsilon(epsilon);
        p.validate()?;
        let rc = renorm_constants(&m, &p, lambda, params.volume)?;
        let ev = Interactions::with_default_grid(&m, &p, &rc)?;
        let w = estimate_from_values(&sample_functional(&ev, Functional::W, params.n_samples, params.seed))?;
        if w.heavy_tail {
            warnings.push(format!("λ = {lambda}: W estimate has ess {:.1} (heavy tail)", w.ess));
        }
        points.push(ScanPoint {
            lambda,
            epsilon,
            cutoff,
            modes: m.len(),
            constants: rc,
            gap: (w.value - reference.value).abs(),
            gap_std_error: w.std_error.hypot(reference.std_error),
            w,
            reference,
        });
    }
    Ok(ScanOutput { points, warnings })
}

/// `true` when `gaps[i+1] ≤ gaps[i] + k·√(σᵢ² + σᵢ₊₁²)` for every consecutive pair.
pub fn is_nonincreasing_within(gaps: &[(f64, f64)], k: f64) -> bool {
    gaps.windows(2).all(|w| w[1].0 <= w[0].0 + k * w[0].1.hypot(w[1].1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::UNIT_VOLUME;
    use approx::assert_relative_eq;

    #[test]
    fn trivial_functionals() {
        let zero = estimate_from_values(&[0.0; 200]).unwrap();
        assert_eq!(zero.value, 0.0);
        assert_eq!(zero.std_error, 0.0);
        assert_eq!(zero.ess, 200.0);
        let c = estimate_from_values(&[3.25; 150]).unwrap();
        assert_relative_eq!(c.value, 3.25, max_relative = 1e-15);
        assert!(estimate_from_values(&[0.0; 50]).is_err());
        assert!(estimate_from_values(&[f64::NAN; 200]).is_err());
    }

    #[test]
    fn extreme_values_do_not_overflow() {
        let vals: Vec<f64> = (0..1000).map(|i| -2000.0 + (i % 7) as f64).collect();
        let e = estimate_from_values(&vals).unwrap();
        assert!(e.value.is_finite() && e.value < -1990.0);
        let vals: Vec<f64> = (0..1000).map(|i| if i == 0 { 0.0 } else { 500.0 }).collect();
        let e = estimate_from_values(&vals).unwrap();
        assert!(e.heavy_tail);
        assert!(e.ess < 1.01);
    }

    #[test]
    fn single_mode_oracle_matches_gaussian_integral() {
        // F(s) = a s: ∫ e^{-s - a s} ds = 1/(1+a).
        let a = 0.7;
        assert_relative_eq!(single_mode_oracle(1.0, |s| a * s), (1.0 + a).ln(), max_relative = 1e-12);
        assert!(single_mode_oracle(1.0, |_| 0.0).abs() < 1e-13);
    }

    #[test]
    fn single_mode_estimate_matches_oracle() {
        let m = ModeSet::new(1.0).unwrap();
        let p = PotentialSpec::gaussian(0.1);
        let rc = renorm_constants(&m, &p, 0.3, UNIT_VOLUME).unwrap();
        let est = estimate_relative_partition(Functional::W, &m, &p, &rc, 20_000, 4).unwrap();
        let exact = single_mode_oracle(1.0, single_mode_w(&p, &rc));
        assert!((est.value - exact).abs() < 3.0 * est.std_error, "{} ± {} vs {exact}", est.value, est.std_error);
        let est_v = estimate_relative_partition(Functional::V, &m, &p, &rc, 20_000, 4).unwrap();
        let exact_v = single_mode_oracle(1.0, single_mode_v(&rc));
        assert!((est_v.value - exact_v).abs() < 3.0 * est_v.std_error);
        assert!(est.value <= est.mean_functional + 3.0 * est.mean_functional_std_error);
    }

    #[test]
    fn scaling_validation() {
        assert!(validate_scaling(0.04, 0.33, ParameterMode::Theorem).is_ok());
        let err = validate_scaling(0.05, 0.45, ParameterMode::Theorem).unwrap_err().to_string();
        assert!(err.contains("1/24"), "{err}");
        assert!(validate_scaling(0.02, 0.1, ParameterMode::Theorem).unwrap_err().to_string().contains("8η < ν < 1/3"));
        assert_eq!(validate_scaling(0.05, 0.45, ParameterMode::Exploratory).unwrap().len(), 2);
        assert!(validate_scaling(-1.0, 0.2, ParameterMode::Exploratory).is_err());
    }

    #[test]
    fn monotone_check() {
        assert!(is_nonincreasing_within(&[(1.0, 0.1), (0.5, 0.1), (0.6, 0.1)], 2.0));
        assert!(!is_nonincreasing_within(&[(1.0, 0.01), (2.0, 0.01)], 2.0));
    }
}
