//! The renormalized many-body Hamiltonian compressed to the projected Fock space.

use super::basis::FockBasis;
use super::operator::{density_mode, dgamma, number_operator, FockOperator};
use crate::error::{Error, Result};
use crate::spectral::{Mode, PotentialSpec, RenormConstants};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Coefficients of the projected renormalized Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianTerms {
    pub lambda: f64,
    pub volume: f64,
    pub tau: f64,
    pub e_const: f64,
    pub n0: f64,
}

impl HamiltonianTerms {
    pub fn from_constants(rc: &RenormConstants) -> Self {
        Self { lambda: rc.lambda, volume: rc.volume, tau: rc.tau, e_const: rc.e_const, n0: rc.n0 }
    }
}

/// `λ dΓ(h)` with `h = diag(λ_k)`.
pub fn scaled_free_hamiltonian(basis: &FockBasis, lambda: f64) -> FockOperator {
    let h = DMatrix::from_diagonal(&DVector::from_iterator(
        basis.n_modes(),
        basis.modes().eigenvalues().iter().map(|&l| Complex64::new(lambda * l, 0.0)),
    ));
    dgamma(&h, basis)
}

/// `λH` for an arbitrary nonnegative interaction profile `ŵ`:
///
/// ```text
/// λH = λ dΓ(h) + (λ²/2) V² Σ_k ŵ(k) (D_k - δ_{k0} N₀)† (D_k - δ_{k0} N₀) - λ V τ (𝒩 - N₀) - E
/// ```
///
/// with `D_k = dΓ(e_k^-)` and `k` over the difference set of the modes.
pub fn scaled_hamiltonian_with(basis: &FockBasis, w_hat: impl Fn(Mode) -> f64, t: &HamiltonianTerms) -> FockOperator {
    let lambda = t.lambda;
    let dim = basis.dim();
    let mut h = scaled_free_hamiltonian(basis, lambda);
    let number = number_operator(basis);
    let pref = 0.5 * lambda * lambda * t.volume * t.volume;
    for k in basis.modes().differences() {
        let w = w_hat(k);
        if w == 0.0 {
            continue;
        }
        let d = if k == [0, 0] { number.shift(Complex64::new(t.n0, 0.0)) } else { density_mode(basis, k) };
        h = h.add(&d.adjoint().mul(&d).scale(Complex64::new(pref * w, 0.0)));
    }
    let shifted_number = number.shift(Complex64::new(t.n0, 0.0));
    h = h.sub(&shifted_number.scale(Complex64::new(lambda * t.volume * t.tau, 0.0)));
    h = h.shift(Complex64::new(t.e_const, 0.0));
    debug_assert!(h.hermiticity_defect() < 1e-9 * h.max_abs().max(1.0));
    // Entries are real sums of real terms; make the flag exact.
    FockOperator::from_triplets(dim, h.triplets().map(|(i, j, v)| (i, j, Complex64::new(v.re, 0.0))))
}

/// `λH^ε` on the projected Fock space built from `(ε, K, λ, V)` constants.
pub fn build_renormalized_hamiltonian(
    basis: &FockBasis,
    p: &PotentialSpec,
    rc: &RenormConstants,
    lambda: f64,
) -> Result<FockOperator> {
    if rc.modes != basis.n_modes() || rc.epsilon != p.epsilon {
        return Err(Error::Config("renormalization constants were built for a different mode set or ε".into()));
    }
    if rc.lambda != lambda {
        return Err(Error::Config(format!("renormalization constants were built for λ = {}, not {lambda}", rc.lambda)));
    }
    Ok(scaled_hamiltonian_with(basis, |k| p.w_hat_eps(k), &HamiltonianTerms::from_constants(rc)))
}
