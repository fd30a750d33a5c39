//! Truncated bosonic Fock space over a finite set of torus modes.

pub mod basis;
pub mod hamiltonian;
pub mod operator;
pub mod state;

pub use basis::{fock_dimension, FockBasis, MAX_DIMENSION};
pub use hamiltonian::{
    build_renormalized_hamiltonian, scaled_free_hamiltonian, scaled_hamiltonian_with, HamiltonianTerms,
};
pub use operator::{build_ladder, creation, density_mode, dgamma, number_operator, FockOperator};
pub use state::{
    adaptive_gibbs, free_energy_functional, gibbs_state, p_localize, random_state, reduced_density, relative_entropy,
    variance_observable, BlockEigen, DensityOperator, GibbsState,
};

/// `log Z₀,P = -Σ_k log(1 - e^{-λ λ_k})` on the untruncated Fock space.
pub fn free_log_partition(modes: &crate::spectral::ModeSet, lambda: f64) -> f64 {
    -modes.eigenvalues().iter().map(|&l| (-(-lambda * l).exp()).ln_1p()).collect::<crate::stats::KahanSum>().value()
}
