//! Moments of the lower symbol against reduced density matrices:
//!
//! ```text
//! ∫ |u^{⊗k}⟩⟨u^{⊗k}| dμ = k! λ^k Σ_ℓ C(k,ℓ) Γ^{(ℓ)} ⊗_s 1
//! ```
//!
//! For `k = 1` this is `λ(Γ⁽¹⁾ + 1)`, for `k = 2` it is
//! `2λ²(Γ⁽²⁾ + 2 P_s(Γ⁽¹⁾ ⊗ 1)P_s + P_s)`.

use super::husimi::{husimi_sample, DiagonalGaussian, HusimiEvaluator};
use crate::error::{Error, Result};
use crate::fock::{reduced_density, DensityOperator, FockBasis};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Largest mode count for which the moment identity is checked by sampling.
pub const MAX_DEFINETTI_MODES: usize = 3;

/// Outcome of a de Finetti moment check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeFinettiReport {
    pub order: usize,
    pub n_modes: usize,
    pub lambda: f64,
    pub n_samples: usize,
    /// `‖M̂ - M‖₁` between the sampled moment and the reduced-density expression.
    pub residual: f64,
    /// Standard error of `residual`: `√rank · ‖SE‖_F` with entrywise standard errors.
    pub std_error: f64,
    /// Effective sample size of the importance weights.
    pub ess: f64,
    /// `‖k!λ^k Γ^{(k)} - M‖₁` with the exact moment.
    pub bound_lhs: f64,
    /// `‖k!λ^k Γ^{(k)} - M̂‖₁` with the sampled moment.
    pub bound_lhs_sampled: f64,
    /// `λ^k Σ_{ℓ=0}^{k} C(k,ℓ)² (k-ℓ+K-1)!/(K-1)! Tr[𝒩^ℓ Γ]`.
    pub bound_rhs: f64,
    /// The same sum restricted to `ℓ < k`.
    pub bound_rhs_lower_orders: f64,
}

impl DeFinettiReport {
    pub fn identity_holds(&self, sigmas: f64) -> bool {
        self.residual <= sigmas * self.std_error
    }

    pub fn bound_holds(&self) -> bool {
        self.bound_lhs <= self.bound_rhs * (1.0 + 1e-12)
            && self.bound_lhs_sampled <= self.bound_rhs + 3.0 * self.std_error
    }
}

/// Trace norm of a Hermitian matrix.
pub fn trace_norm(m: &DMatrix<Complex64>) -> f64 {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    SymmetricEigen::new(h).eigenvalues.iter().map(|x| x.abs()).sum()
}

/// Projection onto symmetric two-mode tensors, indices `(m, n) ↦ mK + n`.
pub fn symmetric_projector(k: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(k * k, k * k, |r, c| {
        let (m, n) = (r / k, r % k);
        let (p, q) = (c / k, c % k);
        let v = 0.5 * (f64::from(u8::from(m == p && n == q)) + f64::from(u8::from(m == q && n == p)));
        Complex64::new(v, 0.0)
    })
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn falling_ratio(k_minus_l: usize, modes: usize) -> f64 {
    // (k - ℓ + K - 1)! / (K - 1)!
    (modes..modes + k_minus_l).map(|x| x as f64).product()
}

/// `∫ |u^{⊗k}⟩⟨u^{⊗k}| dμ` from the reduced density matrices of `Γ`.
pub fn exact_moment(
    gamma: &DensityOperator,
    basis: &FockBasis,
    lambda: f64,
    order: usize,
) -> Result<DMatrix<Complex64>> {
    let k = basis.n_modes();
    let g1 = reduced_density(gamma, basis, 1)?;
    match order {
        1 => Ok((g1 + DMatrix::identity(k, k)) * Complex64::new(lambda, 0.0)),
        2 => {
            let g2 = reduced_density(gamma, basis, 2)?;
            let ps = symmetric_projector(k);
            let g1_one = g1.kronecker(&DMatrix::<Complex64>::identity(k, k));
            let mid = &ps * g1_one * &ps;
            Ok((g2 + mid * Complex64::new(2.0, 0.0) + ps) * Complex64::new(2.0 * lambda * lambda, 0.0))
        }
        _ => Err(Error::Unsupported(format!("de Finetti moment of order {order}"))),
    }
}

/// `k! λ^k Γ^{(k)}`.
fn top_order_term(gamma: &DensityOperator, basis: &FockBasis, lambda: f64, order: usize) -> Result<DMatrix<Complex64>> {
    let g = reduced_density(gamma, basis, order)?;
    let factorial: f64 = (1..=order).map(|x| x as f64).product();
    Ok(g * Complex64::new(factorial * lambda.powi(order as i32), 0.0))
}

/// Sample the moment integral with importance sampling from the diagonal
/// Gaussian whose variances `λ(Γ⁽¹⁾_jj + 1)` match the Husimi second moments,
/// and compare against the reduced-density expression.
pub fn definetti_check(
    gamma: &DensityOperator,
    basis: &FockBasis,
    lambda: f64,
    order: usize,
    n_samples: usize,
    seed: u64,
) -> Result<DeFinettiReport> {
    let k = basis.n_modes();
    if k > MAX_DEFINETTI_MODES {
        return Err(Error::Unsupported(format!("de Finetti check with K = {k} > {MAX_DEFINETTI_MODES} modes")));
    }
    if !(1..=2).contains(&order) {
        return Err(Error::Unsupported(format!("de Finetti moment of order {order}")));
    }
    let exact = exact_moment(gamma, basis, lambda, order)?;
    let g1 = reduced_density(gamma, basis, 1)?;
    let proposal = DiagonalGaussian::new((0..k).map(|j| lambda * (g1[(j, j)].re + 1.0)).collect())?;
    let eval = HusimiEvaluator::new(gamma, basis, lambda)?;
    let sample = husimi_sample(&eval, &proposal, n_samples, seed);
    let weights = sample.weights();

    let d = exact.nrows();
    let mut sum = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
    let mut sum_sq = DMatrix::<f64>::zeros(d, d);
    for (u, &w) in sample.points.iter().zip(&weights) {
        let x: Vec<Complex64> = if order == 1 { u.clone() } else { (0..k * k).map(|r| u[r / k] * u[r % k]).collect() };
        for i in 0..d {
            for j in 0..d {
                let v = x[i] * x[j].conj() * w;
                sum[(i, j)] += v;
                sum_sq[(i, j)] += v.norm_sqr();
            }
        }
    }
    let n = n_samples as f64;
    let mean = sum / Complex64::new(n, 0.0);
    let mut se_sq = 0.0;
    for i in 0..d {
        for j in 0..d {
            let var = (sum_sq[(i, j)] / n - mean[(i, j)].norm_sqr()).max(0.0);
            se_sq += var / n;
        }
    }
    let rank = if order == 1 { k } else { k * (k + 1) / 2 } as f64;
    let top = top_order_term(gamma, basis, lambda, order)?;

    let totals: Vec<f64> = (0..basis.dim()).map(|i| basis.total(i) as f64).collect();
    let diag: Vec<f64> = (0..basis.dim()).map(|i| gamma.matrix()[(i, i)].re).collect();
    let moment_n = |l: usize| -> f64 { totals.iter().zip(&diag).map(|(t, p)| t.powi(l as i32) * p).sum() };
    let term = |l: usize| binomial(order, l).powi(2) * falling_ratio(order - l, k) * moment_n(l);
    let lk = lambda.powi(order as i32);
    let ess = {
        let s: f64 = weights.iter().sum();
        let s2: f64 = weights.iter().map(|w| w * w).sum();
        s * s / s2
    };
    Ok(DeFinettiReport {
        order,
        n_modes: k,
        lambda,
        n_samples,
        residual: trace_norm(&(&mean - &exact)),
        std_error: rank.sqrt() * se_sq.sqrt(),
        ess,
        bound_lhs: trace_norm(&(&top - &exact)),
        bound_lhs_sampled: trace_norm(&(&top - &mean)),
        bound_rhs: lk * (0..=order).map(term).sum::<f64>(),
        bound_rhs_lower_orders: lk * (0..order).map(term).sum::<f64>(),
    })
}
