//! Husimi oracle, de Finetti moment and Berezin–Lieb checks.

use crate::config::{build_modes, check_lambdas, ExperimentConfig};
use crate::error::Result;
use crate::record::{CheckRecord, RunResult};
use gibbs_core::fock::{
    build_renormalized_hamiltonian, gibbs_state, scaled_free_hamiltonian, DensityOperator, FockBasis,
};
use gibbs_core::semiclassics::{
    berezin_lieb_first, berezin_lieb_second, definetti_check, free_gibbs_husimi_oracle, free_gibbs_truncation_defect,
    BerezinLiebReport, ClassicalMethod, DiagonalGaussian, GaussianSymbol, HusimiEvaluator,
};
use gibbs_core::spectral::{renorm_constants, ModeSet};
use gibbs_core::stats::sample_stream;

const SUITE: &str = "semiclassics";

/// Gibbs state at `lambda` on `basis`: interacting with range `epsilon`, or free.
pub fn gibbs_on(
    config: &ExperimentConfig,
    basis: &FockBasis,
    lambda: f64,
    epsilon: Option<f64>,
) -> Result<DensityOperator> {
    let h = match epsilon {
        Some(eps) => {
            let p = config.potential_at(eps)?;
            let rc = renorm_constants(basis.modes(), &p, lambda, config.volume()?)?;
            build_renormalized_hamiltonian(basis, &p, &rc, lambda)?
        }
        None => scaled_free_hamiltonian(basis, lambda),
    };
    Ok(gibbs_state(&h)?.state)
}

/// Generic lower symbol of the truncated free Gibbs state against its closed form.
pub fn husimi_checks(config: &ExperimentConfig) -> Result<Vec<CheckRecord>> {
    let h = &config.husimi;
    check_lambdas(&h.lambdas, f64::INFINITY)?;
    let modes = build_modes(h.cutoff, &h.modes)?;
    let basis = FockBasis::with_cap(&modes, h.n_max, config.fock.dimension_cap)?;
    let mut checks = Vec::new();
    for (index, &lambda) in h.lambdas.iter().enumerate() {
        let state = gibbs_state(&scaled_free_hamiltonian(&basis, lambda))?.state;
        let eval = HusimiEvaluator::new(&state, &basis, lambda)?;
        let proposal = DiagonalGaussian::free_gibbs(&modes, lambda);
        let mut rng = sample_stream(config.seed, index as u64);
        let mut worst = 0.0f64;
        let mut worst_abs = 0.0f64;
        for _ in 0..h.n_points {
            let u = proposal.sample(&mut rng);
            let (got, want) = (eval.density(&u), free_gibbs_husimi_oracle(&u, lambda, &modes));
            let allowed = h.relative_tolerance * want + free_gibbs_truncation_defect(&u, lambda, &basis);
            let diff = (got - want).abs();
            worst_abs = worst_abs.max(diff);
            worst = worst.max(if allowed > 0.0 { diff / allowed } else { f64::INFINITY * diff });
        }
        checks.push(CheckRecord::at_most(
            SUITE,
            format!("husimi_free_gibbs_oracle(lambda={lambda})"),
            worst,
            1.0,
            format!(
                "K = {}, n_max = {}, {} points; max |Δ| = {worst_abs:.3e}; value is |Δ| / ({:e}·oracle + truncation defect)",
                modes.len(),
                h.n_max,
                h.n_points,
                h.relative_tolerance
            ),
        ));
    }
    Ok(checks)
}

/// Moment identity and quantitative bound for each configured order.
pub fn definetti_checks(config: &ExperimentConfig, n_samples: usize) -> Result<Vec<CheckRecord>> {
    let d = &config.definetti;
    let modes = build_modes(d.cutoff, &d.modes)?;
    let basis = FockBasis::with_cap(&modes, d.n_max, config.fock.dimension_cap)?;
    let state = gibbs_on(config, &basis, d.lambda, d.interacting.then_some(d.epsilon))?;
    let mut checks = Vec::new();
    for &order in &d.orders {
        let r = definetti_check(&state, &basis, d.lambda, order, n_samples, config.seed)?;
        checks.push(CheckRecord::at_most(
            SUITE,
            format!("definetti_identity(k={order})"),
            r.residual,
            d.sigmas * r.std_error,
            format!("K = {}, λ = {}, {} samples, ess {:.0}", r.n_modes, r.lambda, r.n_samples, r.ess),
        ));
        checks.push(CheckRecord::new(
            SUITE,
            format!("definetti_bound(k={order})"),
            r.bound_holds(),
            r.bound_lhs,
            r.bound_rhs,
            format!("sampled lhs {:.4e}; rhs over ℓ < k: {:.4e}", r.bound_lhs_sampled, r.bound_rhs_lower_orders),
        ));
    }
    Ok(checks)
}

fn berezin_record(r: &BerezinLiebReport, tolerance: f64, label: &str) -> CheckRecord {
    CheckRecord::at_most(
        SUITE,
        format!("berezin_lieb_{label}({})", r.function.name()),
        -r.margin,
        tolerance + r.std_error,
        format!("quantum {:.10e}, classical {:.10e}", r.quantum, r.classical),
    )
}

/// Both Berezin–Lieb inequalities for one mode and every configured test function.
pub fn berezin_checks(config: &ExperimentConfig) -> Result<Vec<CheckRecord>> {
    let b = &config.berezin;
    let modes = ModeSet::new(1.0)?;
    let basis = FockBasis::with_cap(&modes, b.n_max, config.fock.dimension_cap)?;
    let state = gibbs_on(config, &basis, b.lambda, b.interacting.then_some(b.epsilon))?;
    let symbol = GaussianSymbol(DiagonalGaussian::new(vec![b.symbol_lambda * b.symbol_variance])?);
    let mut checks = Vec::new();
    for &f in &b.functions {
        let first = berezin_lieb_first(&state, &basis, f, ClassicalMethod::Quadrature)?;
        checks.push(berezin_record(&first, b.margin_tolerance, "first"));
        let second = berezin_lieb_second(&symbol, b.symbol_lambda, &basis, f)?;
        checks.push(berezin_record(&second, b.margin_tolerance, "second"));
    }
    Ok(checks)
}

fn wrap(command: &str, config: &ExperimentConfig, checks: Vec<CheckRecord>) -> RunResult {
    let mut out = RunResult::new(command, config);
    out.checks = checks;
    out.finish()
}

pub fn run_husimi(config: &ExperimentConfig) -> Result<RunResult> {
    Ok(wrap("husimi", config, husimi_checks(config)?))
}

pub fn run_definetti(config: &ExperimentConfig) -> Result<RunResult> {
    Ok(wrap("definetti", config, definetti_checks(config, config.n_samples)?))
}

pub fn run_berezin(config: &ExperimentConfig) -> Result<RunResult> {
    Ok(wrap("berezin", config, berezin_checks(config)?))
}
