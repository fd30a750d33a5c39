//! Quantum against classical relative free energies on a fixed projected mode set.

use crate::config::{build_modes, check_lambdas, ExperimentConfig};
use crate::error::{CliError, Result};
use crate::record::{PointRecord, RunResult};
use gibbs_core::field::{cross_term_l2_norm, Functional, Interactions};
use gibbs_core::fock::{
    adaptive_gibbs, build_renormalized_hamiltonian, fock_dimension, free_log_partition, scaled_free_hamiltonian,
};
use gibbs_core::free_energy::{estimate_from_values, estimate_relative_partition, single_mode_oracle, single_mode_w};
use gibbs_core::spectral::renorm_constants;

/// For each `λ`: `ε = λ^η`, the Gibbs state of the renormalized Hamiltonian on the
/// projected Fock space (with `n_max` grown per the Fock policy), and the importance
/// sampling estimate of the classical relative free energy on the same modes.
pub fn run(config: &ExperimentConfig) -> Result<RunResult> {
    let c = &config.compare;
    let mut out = RunResult::new("compare", config);
    out.warnings = config.check_eta(c.eta)?;
    check_lambdas(&c.lambdas, 1.0)?;
    let volume = config.volume()?;
    let modes = build_modes(c.cutoff, &c.modes)?;
    let policy = &config.fock;
    // Fail before any work when even the starting truncation is infeasible.
    let start_dim = fock_dimension(modes.len(), policy.n_start.max(1));
    if start_dim > policy.dimension_cap {
        return Err(CliError::Config(format!(
            "Fock dimension {start_dim} for K = {} modes at n_max = {} exceeds the cap {}",
            modes.len(),
            policy.n_start,
            policy.dimension_cap
        )));
    }

    for &lambda in &c.lambdas {
        let epsilon = lambda.powf(c.eta);
        let p = config.potential_at(epsilon)?;
        let rc = renorm_constants(&modes, &p, lambda, volume)?;
        let (basis, gibbs, top) =
            adaptive_gibbs(&modes, policy.n_start, policy.top_shell_tolerance, policy.dimension_cap, |b| {
                if c.interaction {
                    build_renormalized_hamiltonian(b, &p, &rc, lambda)
                } else {
                    Ok(scaled_free_hamiltonian(b, lambda))
                }
            })
            .map_err(|e| match e {
                gibbs_core::Error::Config(msg) => CliError::Config(format!("λ = {lambda}: {msg}")),
                other => other.into(),
            })?;
        let quantum = free_log_partition(&modes, lambda) - gibbs.log_partition;

        let (classical, oracle, cross_norm) = if c.interaction {
            let est = estimate_relative_partition(Functional::W, &modes, &p, &rc, config.n_samples, config.seed)?;
            let oracle = (modes.len() == 1).then(|| single_mode_oracle(modes.eigenvalues()[0], single_mode_w(&p, &rc)));
            let norm = cross_term_l2_norm(&Interactions::with_default_grid(&modes, &p, &rc)?);
            (est, oracle, norm)
        } else {
            (estimate_from_values(&vec![0.0; config.n_samples])?, (modes.len() == 1).then_some(0.0), 0.0)
        };
        if classical.heavy_tail {
            out.warnings.push(format!("λ = {lambda}: classical estimate has ess {:.1} (heavy tail)", classical.ess));
        }
        out.records.push(PointRecord {
            lambda,
            epsilon,
            cutoff: modes.cutoff(),
            modes: modes.len(),
            n_max: Some(basis.n_max()),
            quantum: Some(quantum),
            classical: classical.value,
            classical_std_error: classical.std_error,
            classical_oracle: oracle,
            reference: None,
            reference_std_error: None,
            gap: (quantum - classical.value).abs(),
            gap_std_error: classical.std_error,
            top_shell_mass: Some(top),
            ess: classical.ess,
            heavy_tail: classical.heavy_tail,
            tau: rc.tau,
            e_const: rc.e_const,
            cross_norm,
        });
    }
    Ok(out.finish())
}
