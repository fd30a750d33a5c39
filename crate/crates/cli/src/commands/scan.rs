//! Joint cutoff/range scan of the classical relative free energy.

use crate::config::{check_lambdas, ExperimentConfig};
use crate::error::Result;
use crate::record::{PointRecord, RunResult};
use gibbs_core::field::{cross_term_l2_norm, Interactions};
use gibbs_core::free_energy::{joint_limit_scan, ScanParams};
use gibbs_core::spectral::{ModeSet, PotentialSpec};

pub fn run(config: &ExperimentConfig) -> Result<RunResult> {
    let s = &config.scan;
    let mut out = RunResult::new("scan-classical", config);
    check_lambdas(&s.lambdas, 1.0)?;
    // Validated here so that exploratory warnings end up in the record.
    out.warnings = config.check_scaling()?;
    let params = ScanParams {
        eta: s.eta,
        nu: s.nu,
        lambdas: s.lambdas.clone(),
        reference_cutoff: s.reference_cutoff,
        potential: PotentialSpec::new(config.potential, 1.0),
        volume: config.volume()?,
        n_samples: config.n_samples,
        seed: config.seed,
        mode: config.mode,
    };
    let scan = joint_limit_scan(&params)?;
    for w in scan.warnings {
        if !out.warnings.contains(&w) {
            out.warnings.push(w);
        }
    }
    for pt in scan.points {
        let m = ModeSet::new(pt.cutoff)?;
        let p = params.potential.with_epsilon(pt.epsilon);
        let cross_norm = cross_term_l2_norm(&Interactions::with_default_grid(&m, &p, &pt.constants)?);
        out.records.push(PointRecord {
            lambda: pt.lambda,
            epsilon: pt.epsilon,
            cutoff: pt.cutoff,
            modes: pt.modes,
            n_max: None,
            quantum: None,
            classical: pt.w.value,
            classical_std_error: pt.w.std_error,
            classical_oracle: None,
            reference: Some(pt.reference.value),
            reference_std_error: Some(pt.reference.std_error),
            gap: pt.gap,
            gap_std_error: pt.gap_std_error,
            top_shell_mass: None,
            ess: pt.w.ess,
            heavy_tail: pt.w.heavy_tail,
            tau: pt.constants.tau,
            e_const: pt.constants.e_const,
            cross_norm,
        });
    }
    Ok(out.finish())
}
