//! Invariant suites: fast versions of the library's correctness properties,
//! reported as one pass/fail record per check.

use super::semiclassics::{berezin_checks, definetti_checks, husimi_checks};
use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::record::{CheckRecord, RunResult};
use gibbs_core::field::{cross_term_l2_norm, sample_free_field, Functional, Interactions};
use gibbs_core::fock::{
    build_ladder, build_renormalized_hamiltonian, free_energy_functional, free_log_partition, gibbs_state, p_localize,
    random_state, reduced_density, relative_entropy, scaled_free_hamiltonian, FockBasis,
};
use gibbs_core::free_energy::{
    estimate_relative_partition, sample_functional, single_mode_oracle, single_mode_w, validate_scaling, ParameterMode,
};
use gibbs_core::spectral::{
    counterterm_asymptotics, dispersion, green_truncated, n0_asymptotics_check, renorm_constants, successive_drift,
    wick_mass, ModeSet, PotentialSpec, LEBESGUE_VOLUME,
};
use gibbs_core::stats::{mean_std, sample_stream};
use gibbs_core::Complex64;
use nalgebra::DVector;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Spectral,
    Classical,
    Quantum,
    Semiclassics,
    All,
}

impl std::str::FromStr for Suite {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "spectral" => Self::Spectral,
            "classical" => Self::Classical,
            "quantum" => Self::Quantum,
            "semiclassics" => Self::Semiclassics,
            "all" => Self::All,
            other => {
                return Err(CliError::Config(format!(
                    "unknown suite {other:?}; expected spectral, classical, quantum, semiclassics or all"
                )))
            }
        })
    }
}

pub fn run(config: &ExperimentConfig, suite: Suite) -> Result<RunResult> {
    let mut out = RunResult::new("verify", config);
    let suites: &[Suite] = match suite {
        Suite::All => &[Suite::Spectral, Suite::Classical, Suite::Quantum, Suite::Semiclassics],
        _ => std::slice::from_ref(&suite),
    };
    for s in suites {
        let checks = match s {
            Suite::Spectral => spectral()?,
            Suite::Classical => classical(config)?,
            Suite::Quantum => quantum(config)?,
            Suite::Semiclassics => semiclassics(config)?,
            Suite::All => unreachable!(),
        };
        out.checks.extend(checks);
    }
    Ok(out.finish())
}

fn spectral() -> Result<Vec<CheckRecord>> {
    const S: &str = "spectral";
    let mut checks = Vec::new();

    let mut worst = 0usize;
    for cutoff in [1.0, 2.0, 5.0, 17.5, 50.0] {
        let m = ModeSet::new(cutoff)?;
        let r = cutoff.sqrt() as i64 + 1;
        let brute = (-r..=r).flat_map(|a| (-r..=r).map(move |b| [a, b])).filter(|&k| dispersion(k) <= cutoff).count();
        worst = worst.max(m.len().abs_diff(brute));
    }
    checks.push(CheckRecord::at_most(
        S,
        "mode_count_matches_lattice_count",
        worst as f64,
        0.0,
        "Λ ∈ {1, 2, 5, 17.5, 50}",
    ));

    let m2 = ModeSet::new(2.0)?;
    let g = green_truncated([PI, PI], &m2);
    checks.push(CheckRecord::at_most(
        S,
        "green_function_at_half_period",
        (g + 1.0).abs(),
        1e-14,
        "G_K(π, π) = -1 at Λ = 2",
    ));

    let m = ModeSet::new(1.0e4)?;
    let diag = (green_truncated([0.0, 0.0], &m) - wick_mass(&m)).abs();
    checks.push(CheckRecord::at_most(S, "green_function_diagonal_is_wick_mass", diag, 1e-9, "Λ = 10⁴"));
    let r: f64 = 0.05;
    let ratio = green_truncated([r, 0.0], &m) / LEBESGUE_VOLUME / (-r.ln() / (2.0 * PI));
    checks.push(CheckRecord::at_most(
        S,
        "green_function_log_law",
        (ratio - 1.0).abs(),
        0.2,
        format!("G_K(r)/(2π)² ÷ (-log r / 2π) = {ratio:.4} at r = 0.05, Λ = 10⁴"),
    ));

    let eps: Vec<f64> = (3..=8).map(|j| 2f64.powi(-j)).collect();
    let rows = counterterm_asymptotics(&eps, &PotentialSpec::gaussian(1.0), 4.0, 1.0)?;
    let tau: Vec<f64> = rows.iter().map(|r| r.tau_ratio).collect();
    let e: Vec<f64> = rows.iter().map(|r| r.e_ratio).collect();
    let drift = successive_drift(&tau).into_iter().chain(successive_drift(&e)).fold(0.0, f64::max);
    checks.push(CheckRecord::at_most(
        S,
        "counterterm_log_growth",
        drift,
        0.1,
        format!("ε = 2⁻³…2⁻⁸, Λ = 4ε⁻²: τ/|log ε| → {:.4}, E/|log ε|² → {:.4}", tau.last().unwrap(), e.last().unwrap()),
    ));

    let mut prev = f64::INFINITY;
    let mut monotone = true;
    let m30 = ModeSet::new(30.0)?;
    for eps in [0.05, 0.1, 0.2, 0.4, 0.8, 1.0] {
        let rc = renorm_constants(&m30, &PotentialSpec::gaussian(eps), 0.5, 1.0)?;
        monotone &= rc.tau <= prev && rc.tau >= 0.0 && rc.e_const >= 0.0;
        prev = rc.tau;
    }
    checks.push(CheckRecord::new(S, "tau_monotone_in_epsilon", monotone, 0.0, 0.0, "Λ = 30"));

    let row = n0_asymptotics_check(&[1e-6])?[0];
    let target = 1.0 / (4.0 * PI);
    checks.push(CheckRecord::at_most(
        S,
        "n0_log_coefficient",
        (row.coefficient - target).abs(),
        0.05 * target,
        format!("N₀λ/(|log λ|(2π)²) = {:.5} at λ = 10⁻⁶", row.coefficient),
    ));
    Ok(checks)
}

fn classical(config: &ExperimentConfig) -> Result<Vec<CheckRecord>> {
    const S: &str = "classical";
    let mut checks = Vec::new();
    let volume = config.volume()?;
    let m = ModeSet::new(10.0)?;
    let p = PotentialSpec::gaussian(0.2);
    let rc = renorm_constants(&m, &p, 1.0, volume)?;
    let ev = Interactions::with_default_grid(&m, &p, &rc)?;

    let mut identity = 0.0f64;
    let mut young = f64::NEG_INFINITY;
    for i in 0..50 {
        let v = ev.evaluate(&sample_free_field(&m, config.seed, i));
        let scale = v.v_smeared.abs().max(1.0);
        identity = identity.max((v.v_smeared - v.w - v.cross).abs() / scale);
        young = young.max(ev.young_bound() - v.w);
    }
    checks.push(CheckRecord::at_most(
        S,
        "smeared_quartic_splits",
        identity,
        1e-8,
        "V^ε = W + I on 50 samples, Λ = 10, ε = 0.2",
    ));
    checks.push(CheckRecord::at_most(S, "w_young_lower_bound", young, 1e-9, "max(bound - W) over 50 samples"));

    let n = 20_000;
    let w = sample_functional(&ev, Functional::W, n, config.seed);
    let (mean, sd) = mean_std(&w);
    let se = sd / (n as f64).sqrt();
    checks.push(CheckRecord::at_most(S, "w_mean_zero", mean.abs(), 3.0 * se, format!("{n} samples, Λ = 10, ε = 0.2")));

    let single = ModeSet::new(1.0)?;
    let lambda: f64 = 0.3;
    let p1 = PotentialSpec::gaussian(lambda.powf(0.04));
    let rc1 = renorm_constants(&single, &p1, lambda, volume)?;
    let est = estimate_relative_partition(Functional::W, &single, &p1, &rc1, n, config.seed)?;
    let oracle = single_mode_oracle(1.0, single_mode_w(&p1, &rc1));
    checks.push(CheckRecord::at_most(
        S,
        "single_mode_estimate_matches_quadrature",
        (est.value - oracle).abs(),
        3.0 * est.std_error,
        format!("estimate {:.6e} ± {:.1e}, quadrature {oracle:.6e}", est.value, est.std_error),
    ));

    let m30 = ModeSet::new(30.0)?;
    let norms: Vec<f64> = [0.4, 0.2, 0.1, 0.05]
        .iter()
        .map(|&eps| {
            let p = PotentialSpec::gaussian(eps);
            let rc = renorm_constants(&m30, &p, 1.0, volume)?;
            Ok(cross_term_l2_norm(&Interactions::with_default_grid(&m30, &p, &rc)?))
        })
        .collect::<Result<_>>()?;
    checks.push(CheckRecord::new(
        S,
        "cross_term_norm_decreases_with_range",
        norms.windows(2).all(|w| w[1] < w[0]),
        *norms.last().unwrap(),
        norms[0],
        format!(
            "‖I‖ at ε = 0.4, 0.2, 0.1, 0.05 (Λ = 30): {}",
            norms.iter().map(|x| format!("{x:.4e}")).collect::<Vec<_>>().join(", ")
        ),
    ));

    let rejected = validate_scaling(0.04, 0.2, ParameterMode::Theorem)
        .err()
        .is_some_and(|e| e.to_string().contains("8η < ν < 1/3"));
    checks.push(CheckRecord::new(S, "theorem_mode_rejects_bad_scaling", rejected, 0.0, 0.0, "η = 0.04, ν = 0.2"));
    Ok(checks)
}

fn quantum(config: &ExperimentConfig) -> Result<Vec<CheckRecord>> {
    const S: &str = "quantum";
    let mut checks = Vec::new();
    let mut rng = sample_stream(config.seed, 0);

    let single = ModeSet::new(1.0)?;
    let b = FockBasis::new(&single, 40)?;
    let g = gibbs_state(&scaled_free_hamiltonian(&b, 1.0))?;
    checks.push(CheckRecord::at_most(
        S,
        "free_partition_function",
        (g.log_partition - free_log_partition(&single, 1.0)).abs(),
        1e-12,
        "K = 1, n_max = 40, λ = 1",
    ));

    let two = ModeSet::from_modes(vec![[0, 0], [1, 0]])?;
    let b2 = FockBasis::new(&two, 40)?;
    let g2 = gibbs_state(&scaled_free_hamiltonian(&b2, 1.0))?.state;
    let g1 = reduced_density(&g2, &b2, 1)?;
    let be = two
        .eigenvalues()
        .iter()
        .enumerate()
        .map(|(j, &l)| (g1[(j, j)].re - 1.0 / l.exp_m1()).abs())
        .fold((g1[(0, 1)]).norm(), f64::max);
    checks.push(CheckRecord::at_most(S, "free_one_body_density_is_bose_einstein", be, 1e-12, "K = 2, λ = 1"));

    let three = ModeSet::from_modes(vec![[0, 0], [1, 0], [0, 1]])?;
    let b3 = FockBasis::new(&three, 5)?;
    let v = DVector::from_fn(b3.dim(), |i, _| {
        if b3.total(i) < b3.n_max() {
            Complex64::new(rand::Rng::random_range(&mut rng, -1.0..1.0), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let mut ccr = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let (ai, _) = build_ladder(&b3, i);
            let (_, aj_dag) = build_ladder(&b3, j);
            let comm = ai.apply(&aj_dag.apply(&v)) - aj_dag.apply(&ai.apply(&v));
            let want = if i == j { v.clone() } else { v.map(|_| Complex64::new(0.0, 0.0)) };
            ccr = ccr.max((comm - want).norm());
        }
    }
    checks.push(CheckRecord::at_most(S, "canonical_commutation_below_top_shell", ccr, 1e-12, "K = 3, n_max = 5"));

    let lambda = 0.5;
    let p = config.potential_at(0.5)?;
    let bi = FockBasis::new(&two, 8)?;
    let rc = renorm_constants(&two, &p, lambda, config.volume()?)?;
    let h = build_renormalized_hamiltonian(&bi, &p, &rc, lambda)?;
    checks.push(CheckRecord::at_most(S, "hamiltonian_is_hermitian", h.hermiticity_defect(), 1e-12, "K = 2, n_max = 8"));
    let gi = gibbs_state(&h)?;
    let f_min = gi.free_energy();
    let mut worst = f64::NEG_INFINITY;
    for i in 0..20 {
        let trial = gi.state.mix(&random_state(bi.dim(), 1 + i % 5, &mut rng), 0.05 * (i + 1) as f64)?;
        worst = worst.max(f_min - free_energy_functional(&h, &trial));
    }
    checks.push(CheckRecord::at_most(
        S,
        "gibbs_state_minimizes_free_energy",
        worst,
        1e-9,
        "20 trial states; value is max(F_Gibbs - F_trial)",
    ));

    let sub = ModeSet::from_modes(vec![[0, 0]])?;
    let bl = FockBasis::new(&two, 4)?;
    let mut excess = f64::NEG_INFINITY;
    for _ in 0..10 {
        let a = random_state(bl.dim(), bl.dim(), &mut rng);
        let c = random_state(bl.dim(), bl.dim(), &mut rng);
        let (ap, _) = p_localize(&a, &bl, &sub)?;
        let (cp, _) = p_localize(&c, &bl, &sub)?;
        excess = excess.max(relative_entropy(&ap, &cp)? - relative_entropy(&a, &c)?);
    }
    checks.push(CheckRecord::at_most(
        S,
        "localization_decreases_relative_entropy",
        excess,
        1e-10,
        "10 random pairs, K = 2 → 1",
    ));
    Ok(checks)
}

fn semiclassics(config: &ExperimentConfig) -> Result<Vec<CheckRecord>> {
    let mut checks = husimi_checks(config)?;
    checks.extend(definetti_checks(config, config.n_samples.min(20_000))?);
    checks.extend(berezin_checks(config)?);
    Ok(checks)
}
