//! Finite-cutoff constructions of the Wick-renormalized classical Gibbs measures
//! on the torus `[0, 2π]²` and of the grand-canonical Gibbs states of the
//! corresponding bosonic many-body problem, together with the semiclassical
//! machinery (coherent states, lower/upper symbols) connecting the two.
//!
//! The crate is organised bottom-up:
//!
//! * [`spectral`]: Fourier mode sets, dispersion, truncated Green function,
//!   interaction potential and the renormalization constants.
//! * [`field`]: sampling of the projected Gaussian free field and the four
//!   interaction functionals evaluated on samples.
//! * [`free_energy`]: importance-sampling estimates of relative classical
//!   partition functions and the joint cutoff/range scan.
//! * [`fock`]: truncated bosonic Fock space, second quantization, the
//!   renormalized Hamiltonian, Gibbs states and reduced density matrices.
//! * [`semiclassics`]: coherent states, Husimi functions, de Finetti moment
//!   identities, Berezin–Lieb checks and upper-symbol trial states.

// Range checks are written as `!(x > 0.0)` on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fft;
pub mod field;
pub mod fock;
pub mod free_energy;
pub mod quadrature;
pub mod semiclassics;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
pub use num_complex::Complex64;
