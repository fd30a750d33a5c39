//! Lower symbols (Husimi densities) of Fock-space states and the closed-form
//! Husimi density of the free Gibbs state.

use super::coherent::{poisson_tail, ModeFactors};
use crate::error::{Error, Result};
use crate::fock::{DensityOperator, FockBasis};
use crate::spectral::ModeSet;
use crate::stats::{mean_std, sample_stream};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Pointwise evaluator of `u ↦ (λπ)^{-K} ⟨ξ(u/√λ), Γ ξ(u/√λ)⟩`.
///
/// `Γ` lives on the truncated space, so the truncated components of `ξ` give
/// the overlap exactly.
pub struct HusimiEvaluator<'a> {
    gamma: Overlap<'a>,
    basis: &'a FockBasis,
    lambda: f64,
    norm: f64,
}

impl<'a> HusimiEvaluator<'a> {
    pub fn new(gamma: &'a DensityOperator, basis: &'a FockBasis, lambda: f64) -> Result<Self> {
        if gamma.dim() != basis.dim() {
            return Err(Error::Domain("state and basis dimensions differ".into()));
        }
        if !(lambda > 0.0) {
            return Err(Error::Domain(format!("scale must be positive, got {lambda}")));
        }
        Ok(Self {
            gamma: Overlap::new(gamma.matrix()),
            basis,
            lambda,
            norm: (lambda * PI).powi(basis.n_modes() as i32).recip(),
        })
    }

    /// `⟨ξ(u/√λ), Γ ξ(u/√λ)⟩ ∈ [0, 1]`.
    pub fn overlap(&self, u: &[Complex64]) -> f64 {
        let s = self.lambda.sqrt().recip();
        let v: Vec<Complex64> = u.iter().map(|x| x * s).collect();
        let xi = ModeFactors::new(&v, self.basis.n_max()).amplitudes(self.basis);
        self.gamma.quadratic_form(&xi).max(0.0)
    }

    pub fn density(&self, u: &[Complex64]) -> f64 {
        self.norm * self.overlap(u)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn n_modes(&self) -> usize {
        self.basis.n_modes()
    }
}

/// `⟨x, Γ x⟩` for a dense matrix, switching to its nonzero entries when most
/// vanish (number-conserving states are block diagonal).
enum Overlap<'a> {
    Dense(&'a DMatrix<Complex64>),
    Sparse(Vec<(usize, usize, Complex64)>),
}

impl<'a> Overlap<'a> {
    fn new(g: &'a DMatrix<Complex64>) -> Self {
        let d = g.nrows();
        let entries: Vec<(usize, usize, Complex64)> = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .filter_map(|(i, j)| {
                let v = g[(i, j)];
                (v != Complex64::new(0.0, 0.0)).then_some((i, j, v))
            })
            .collect();
        if entries.len() * 4 < d * d {
            Self::Sparse(entries)
        } else {
            Self::Dense(g)
        }
    }

    fn quadratic_form(&self, x: &DVector<Complex64>) -> f64 {
        match self {
            Self::Dense(g) => x.dotc(&(*g * x)).re,
            Self::Sparse(entries) => entries.iter().map(|&(i, j, v)| (x[i].conj() * v * x[j]).re).sum(),
        }
    }
}

/// `(λπ)^{-K} ⟨ξ(u/√λ), Γ_P ξ(u/√λ)⟩`.
pub fn lower_symbol_density(gamma_p: &DensityOperator, basis: &FockBasis, u: &[Complex64], lambda: f64) -> Result<f64> {
    if u.len() != basis.n_modes() {
        return Err(Error::Domain("base point has the wrong number of modes".into()));
    }
    Ok(HusimiEvaluator::new(gamma_p, basis, lambda)?.density(u))
}

/// Product of independent complex Gaussians, `E|u_j|² = variances[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalGaussian {
    pub variances: Vec<f64>,
}

impl DiagonalGaussian {
    pub fn new(variances: Vec<f64>) -> Result<Self> {
        if variances.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::Domain("Gaussian variances must be positive".into()));
        }
        Ok(Self { variances })
    }

    /// Husimi density of the free Gibbs state: `E|u_k|² = λ / (1 - e^{-λλ_k})`.
    pub fn free_gibbs(m: &ModeSet, lambda: f64) -> Self {
        Self { variances: m.eigenvalues().iter().map(|&l| -lambda / (-lambda * l).exp_m1()).collect() }
    }

    pub fn log_density(&self, u: &[Complex64]) -> f64 {
        self.variances.iter().zip(u).map(|(&s, x)| -(PI * s).ln() - x.norm_sqr() / s).sum()
    }

    pub fn density(&self, u: &[Complex64]) -> f64 {
        self.log_density(u).exp()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Complex64> {
        self.variances
            .iter()
            .map(|&s| {
                let sd = (0.5 * s).sqrt();
                Complex64::new(rng.sample::<f64, _>(StandardNormal) * sd, rng.sample::<f64, _>(StandardNormal) * sd)
            })
            .collect()
    }
}

/// `z̃₀^{-1} e^{-⟨u, h̃ u⟩}` with `h̃ = λ^{-1}(1 - e^{-λh})` and `z̃₀ = (λπ)^K Π (1 - e^{-λλ_k})^{-1}`.
pub fn free_gibbs_husimi_oracle(u: &[Complex64], lambda: f64, m: &ModeSet) -> f64 {
    assert_eq!(u.len(), m.len(), "base point has the wrong number of modes");
    let k = m.len() as i32;
    let mut log_z = k as f64 * (lambda * PI).ln();
    let mut quad = 0.0;
    for (x, &l) in u.iter().zip(m.eigenvalues()) {
        let one_minus = -(-lambda * l).exp_m1();
        log_z -= one_minus.ln();
        quad += one_minus / lambda * x.norm_sqr();
    }
    (-quad - log_z).exp()
}

/// Bound on `|ρ_trunc(u) - oracle(u)|` caused by truncating the free Gibbs
/// state to the basis and renormalizing.
///
/// With `t` the free Gibbs weight outside the basis, `p*` the largest
/// outside occupation probability and `d` the Poisson tail of `ξ(u/√λ)`:
/// `|ρ_trunc - ρ| ≤ (t ρ + (λπ)^{-K} p* d) / (1 - t)`.
pub fn free_gibbs_truncation_defect(u: &[Complex64], lambda: f64, basis: &FockBasis) -> f64 {
    let m = basis.modes();
    let q: Vec<f64> = m.eigenvalues().iter().map(|&l| (-lambda * l).exp()).collect();
    let log_ground: f64 = q.iter().map(|&x| (-x).ln_1p()).sum();
    let inside: f64 = basis
        .states()
        .iter()
        .map(|s| {
            let log_p: f64 = s.iter().zip(&q).map(|(&n, &x)| n as f64 * x.ln()).sum();
            (log_ground + log_p).exp()
        })
        .sum();
    let t = (1.0 - inside).max(0.0);
    let q_max = q.iter().cloned().fold(0.0, f64::max);
    let p_star = (log_ground + (basis.n_max() + 1) as f64 * q_max.ln()).exp();
    let mu: f64 = u.iter().map(|x| x.norm_sqr()).sum::<f64>() / lambda;
    let d = poisson_tail(basis.n_max(), mu);
    let rho = free_gibbs_husimi_oracle(u, lambda, m);
    let norm = (lambda * PI).powi(m.len() as i32).recip();
    (t * rho + norm * p_star * d) / (1.0 - t)
}

/// Points drawn from a proposal together with the Husimi density of a state there.
#[derive(Debug, Clone, PartialEq)]
pub struct HusimiSample {
    pub points: Vec<Vec<Complex64>>,
    pub densities: Vec<f64>,
    pub proposal_densities: Vec<f64>,
}

impl HusimiSample {
    /// Importance weights `ρ/q`.
    pub fn weights(&self) -> Vec<f64> {
        self.densities.iter().zip(&self.proposal_densities).map(|(r, q)| r / q).collect()
    }

    /// `(estimate, standard error)` of `∫ ρ = 1`.
    pub fn normalization(&self) -> (f64, f64) {
        let w = self.weights();
        let (m, s) = mean_std(&w);
        (m, s / (w.len() as f64).sqrt())
    }
}

/// Sample `n` points from `proposal` (stream `seed`) and evaluate the Husimi density of `Γ`.
pub fn husimi_sample(eval: &HusimiEvaluator<'_>, proposal: &DiagonalGaussian, n: usize, seed: u64) -> HusimiSample {
    let rows: Vec<(Vec<Complex64>, f64, f64)> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let u = proposal.sample(&mut sample_stream(seed, i));
            let rho = eval.density(&u);
            let q = proposal.density(&u);
            (u, rho, q)
        })
        .collect();
    let mut s = HusimiSample {
        points: Vec::with_capacity(n),
        densities: Vec::with_capacity(n),
        proposal_densities: Vec::with_capacity(n),
    };
    for (u, r, q) in rows {
        s.points.push(u);
        s.densities.push(r);
        s.proposal_densities.push(q);
    }
    s
}

/// Monte Carlo estimate with standard error.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// `H_cl(μ, μ') = ∫ ρ log(ρ/ρ')`, estimated as `E_q[(ρ/q) log(ρ/ρ')]` with
/// points drawn from `q`.
pub fn classical_relative_entropy(
    rho: &(dyn Fn(&[Complex64]) -> f64 + Sync),
    rho_ref: &(dyn Fn(&[Complex64]) -> f64 + Sync),
    proposal: &DiagonalGaussian,
    n: usize,
    seed: u64,
) -> Result<McEstimate> {
    let terms: Vec<Option<f64>> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let u = proposal.sample(&mut sample_stream(seed, i));
            let r = rho(&u);
            if r <= 0.0 {
                return Some(0.0);
            }
            let r_ref = rho_ref(&u);
            if r_ref <= 0.0 {
                return None;
            }
            Some(r / proposal.density(&u) * (r / r_ref).ln())
        })
        .collect();
    let values: Option<Vec<f64>> = terms.into_iter().collect();
    let values = values.ok_or(Error::Support(f64::INFINITY))?;
    let (m, s) = mean_std(&values);
    Ok(McEstimate { value: m, std_error: s / (n as f64).sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{gibbs_state, scaled_free_hamiltonian};

    #[test]
    fn vacuum_density() {
        let m = ModeSet::new(1.0).unwrap();
        let b = FockBasis::new(&m, 10).unwrap();
        let mut p = vec![0.0; b.dim()];
        p[0] = 1.0;
        let vac = DensityOperator::from_diagonal(&p).unwrap();
        for (x, lambda) in [(0.0, 1.0), (0.7, 0.3), (1.5, 2.0)] {
            let u = [Complex64::new(x, -0.2 * x)];
            let d = lower_symbol_density(&vac, &b, &u, lambda).unwrap();
            let expect = (lambda * PI).recip() * (-u[0].norm_sqr() / lambda).exp();
            assert!((d - expect).abs() <= 1e-14 * expect);
        }
    }

    #[test]
    fn free_gibbs_oracle_agrees() {
        let m = ModeSet::from_modes(vec![[0, 0], [1, 0], [0, -1]]).unwrap();
        let lambda = 1.0;
        let b = FockBasis::new(&m, 24).unwrap();
        let g = gibbs_state(&scaled_free_hamiltonian(&b, lambda)).unwrap();
        let ev = HusimiEvaluator::new(&g.state, &b, lambda).unwrap();
        let mut rng = sample_stream(8, 0);
        let prop = DiagonalGaussian::free_gibbs(&m, lambda);
        for _ in 0..10 {
            let u = prop.sample(&mut rng);
            let a = ev.density(&u);
            let o = free_gibbs_husimi_oracle(&u, lambda, &m);
            assert!((a - o).abs() < 1e-4 * o, "{a} vs {o}");
            assert!((o - prop.density(&u)).abs() < 1e-12 * o);
        }
    }

    #[test]
    fn oracle_small_lambda_limit() {
        let m = ModeSet::new(5.0).unwrap();
        let lambda = 1e-3;
        for &l in m.eigenvalues() {
            let h_tilde = -(-lambda * l).exp_m1() / lambda;
            let rel = (l - h_tilde) / l;
            assert!((rel - lambda * l / 2.0).abs() < (lambda * l).powi(2));
        }
    }
}
