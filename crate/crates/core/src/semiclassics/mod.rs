//! Coherent states, lower and upper symbols, de Finetti moments and
//! Berezin–Lieb inequalities on the projected Fock space.

pub mod berezin_lieb;
pub mod coherent;
pub mod definetti;
pub mod husimi;
pub mod upper;

pub use berezin_lieb::{
    berezin_lieb_first, berezin_lieb_second, trace_function, BerezinLiebReport, ClassicalMethod, ConvexFunction,
    Direction,
};
pub use coherent::{coherent_amplitudes, coherent_vector, poisson_tail, CoherentVector, COHERENT_DEFECT_TOLERANCE};
pub use definetti::{definetti_check, exact_moment, trace_norm, DeFinettiReport};
pub use husimi::{
    classical_relative_entropy, free_gibbs_husimi_oracle, free_gibbs_truncation_defect, husimi_sample,
    lower_symbol_density, DiagonalGaussian, HusimiEvaluator, HusimiSample, McEstimate,
};
pub use upper::{
    gaussian_symbol_populations, upper_symbol_operator, upper_symbol_state, GaussianSymbol, PointMass,
    SymbolIntegration, UniformBall, UpperSymbol,
};
