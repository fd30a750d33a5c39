//! States with an explicit upper symbol: `Γ_ν = ∫ ν(u) |ξ(u/√λ)⟩⟨ξ(u/√λ)| du`.

use super::coherent::coherent_amplitudes;
use super::husimi::DiagonalGaussian;
use crate::error::{Error, Result};
use crate::fock::{DensityOperator, FockBasis};
use crate::quadrature::Composite;
use crate::stats::sample_stream;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use rustfft::FftPlanner;
use statrs::function::gamma::ln_gamma;
use std::f64::consts::PI;

/// A positive measure on `C^K` used as an upper symbol.
pub trait UpperSymbol: Sync {
    fn n_modes(&self) -> usize;
    /// Density with respect to Lebesgue measure on `C^K`; `None` for singular measures.
    fn density(&self, u: &[Complex64]) -> Option<f64>;
    /// Draw from the normalized measure `ν / ν(C^K)`.
    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<Complex64>;
    fn total_mass(&self) -> f64;
}

/// Complex Gaussian upper symbol with `E|u_j|² = variances[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSymbol(pub DiagonalGaussian);

impl UpperSymbol for GaussianSymbol {
    fn n_modes(&self) -> usize {
        self.0.variances.len()
    }
    fn density(&self, u: &[Complex64]) -> Option<f64> {
        Some(self.0.density(u))
    }
    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
        self.0.sample(rng)
    }
    fn total_mass(&self) -> f64 {
        1.0
    }
}

/// Dirac mass at `point`; its state is the pure coherent state there.
#[derive(Debug, Clone, PartialEq)]
pub struct PointMass {
    pub point: Vec<Complex64>,
}

impl UpperSymbol for PointMass {
    fn n_modes(&self) -> usize {
        self.point.len()
    }
    fn density(&self, _u: &[Complex64]) -> Option<f64> {
        None
    }
    fn sample(&self, _rng: &mut ChaCha8Rng) -> Vec<Complex64> {
        self.point.clone()
    }
    fn total_mass(&self) -> f64 {
        1.0
    }
}

/// Constant density `height` on the Euclidean ball `‖u‖ ≤ radius` in `C^K`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformBall {
    pub n_modes: usize,
    pub radius: f64,
    pub height: f64,
}

impl UniformBall {
    /// `(λπ)^{-K}` on the ball: its state approximates the identity on low shells.
    pub fn resolution_of_identity(n_modes: usize, radius: f64, lambda: f64) -> Self {
        Self { n_modes, radius, height: (lambda * PI).powi(n_modes as i32).recip() }
    }

    fn volume(&self) -> f64 {
        let k = self.n_modes as i32;
        let fact: f64 = (1..=self.n_modes).map(|x| x as f64).product();
        PI.powi(k) * self.radius.powi(2 * k) / fact
    }
}

impl UpperSymbol for UniformBall {
    fn n_modes(&self) -> usize {
        self.n_modes
    }
    fn density(&self, u: &[Complex64]) -> Option<f64> {
        let r2: f64 = u.iter().map(|x| x.norm_sqr()).sum();
        Some(if r2 <= self.radius * self.radius { self.height } else { 0.0 })
    }
    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
        let g: Vec<f64> = (0..2 * self.n_modes).map(|_| rng.sample(StandardNormal)).collect();
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        let r = self.radius * rng.random::<f64>().powf(1.0 / (2 * self.n_modes) as f64);
        (0..self.n_modes).map(|j| Complex64::new(g[2 * j], g[2 * j + 1]) * (r / norm)).collect()
    }
    fn total_mass(&self) -> f64 {
        self.height * self.volume()
    }
}

/// How the coherent-state integral is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SymbolIntegration {
    /// `ν(C^K) · (1/N) Σ |ξ(u_i/√λ)⟩⟨ξ(u_i/√λ)|` with `u_i ~ ν / ν(C^K)`.
    MonteCarlo { n_samples: usize, seed: u64 },
    /// Polar product rule in `v = u/√λ` (one mode only).
    Quadrature { t_max: f64, panels: usize, order: usize, angles: usize },
}

impl SymbolIntegration {
    /// A polar rule that resolves coherent vectors up to occupation `n_max`.
    pub fn quadrature_for(n_max: usize) -> Self {
        let n = n_max as f64;
        let t_max = n + 30.0 * (n + 1.0).sqrt() + 50.0;
        Self::Quadrature { t_max, panels: t_max.ceil() as usize, order: 16, angles: 4 * n_max + 8 }
    }
}

/// The compression of `∫ ν(u) |ξ(u/√λ)⟩⟨ξ(u/√λ)| du` to the truncated basis.
/// Its trace is `ν(C^K)` minus the weight that leaves the truncated space.
pub fn upper_symbol_operator(
    nu: &dyn UpperSymbol,
    lambda: f64,
    basis: &FockBasis,
    method: SymbolIntegration,
) -> Result<DMatrix<Complex64>> {
    if nu.n_modes() != basis.n_modes() {
        return Err(Error::Domain("symbol and basis have different mode counts".into()));
    }
    let d = basis.dim();
    let accumulate = |terms: Vec<(f64, nalgebra::DVector<Complex64>)>| {
        let mut out = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
        for (w, xi) in terms {
            if w != 0.0 {
                out += &xi * xi.adjoint() * Complex64::new(w, 0.0);
            }
        }
        out
    };
    match method {
        SymbolIntegration::MonteCarlo { n_samples, seed } => {
            let scale = nu.total_mass() / n_samples as f64;
            let terms: Vec<_> = (0..n_samples as u64)
                .into_par_iter()
                .map(|i| {
                    let u = nu.sample(&mut sample_stream(seed, i));
                    (scale, coherent_amplitudes(&u, lambda, basis))
                })
                .collect();
            Ok(accumulate(terms))
        }
        SymbolIntegration::Quadrature { t_max, panels, order, angles } => {
            if basis.n_modes() != 1 {
                return Err(Error::Unsupported(format!(
                    "quadrature of an upper symbol with K = {} modes",
                    basis.n_modes()
                )));
            }
            if nu.density(&[Complex64::new(0.0, 0.0)]).is_none() {
                return Err(Error::Unsupported("quadrature of a singular upper symbol".into()));
            }
            Ok(single_mode_quadrature(nu, lambda, basis.n_max(), t_max, panels, order, angles))
        }
    }
}

/// One-mode quadrature in `v = u/√λ = √t e^{iθ}`. Since
/// `⟨n|ξ(v)⟩⟨ξ(v)|m⟩ = a_n(t) a_m(t) e^{i(n-m)θ}` with
/// `a_n(t) = e^{-t/2} t^{n/2} / √n!`, only the angular Fourier coefficients of
/// `ν` at each radius are needed; they come from one FFT per radial node.
fn single_mode_quadrature(
    nu: &dyn UpperSymbol,
    lambda: f64,
    n_max: usize,
    t_max: f64,
    panels: usize,
    order: usize,
    angles: usize,
) -> DMatrix<Complex64> {
    let radial = Composite::new(0.0, t_max, panels, order);
    let sl = lambda.sqrt();
    let dtheta = 2.0 * PI / angles as f64;
    let fft = FftPlanner::<f64>::new().plan_fft_inverse(angles);
    let ln_fact: Vec<f64> = (0..=n_max).map(|n| ln_gamma(n as f64 + 1.0)).collect();
    let contributions: Vec<DMatrix<Complex64>> = radial
        .points
        .par_chunks(order)
        .map(|chunk| {
            let mut local = DMatrix::from_element(n_max + 1, n_max + 1, Complex64::new(0.0, 0.0));
            let mut buf = vec![Complex64::new(0.0, 0.0); angles];
            for &(t, w) in chunk {
                let r = t.sqrt();
                for (j, b) in buf.iter_mut().enumerate() {
                    let u = [Complex64::from_polar(r * sl, j as f64 * dtheta)];
                    *b = Complex64::new(nu.density(&u).unwrap_or(0.0), 0.0);
                }
                // buf[d] = Σ_j ν_j e^{+i d θ_j}
                fft.process(&mut buf);
                let a: Vec<f64> = (0..=n_max)
                    .map(|n| {
                        if t == 0.0 {
                            f64::from(u8::from(n == 0))
                        } else {
                            (-0.5 * t + 0.5 * n as f64 * t.ln() - 0.5 * ln_fact[n]).exp()
                        }
                    })
                    .collect();
                // d²v = ½ dt dθ and du = λ d²v
                let pref = 0.5 * w * dtheta * lambda;
                for n in 0..=n_max {
                    for m in 0..=n_max {
                        let d = (n as isize - m as isize).rem_euclid(angles as isize) as usize;
                        local[(n, m)] += buf[d] * (pref * a[n] * a[m]);
                    }
                }
            }
            local
        })
        .collect();
    let mut out = DMatrix::from_element(n_max + 1, n_max + 1, Complex64::new(0.0, 0.0));
    for c in contributions {
        out += c;
    }
    out
}

/// `Γ_ν` normalized to unit trace on the truncated space.
pub fn upper_symbol_state(
    nu: &dyn UpperSymbol,
    lambda: f64,
    basis: &FockBasis,
    method: SymbolIntegration,
) -> Result<DensityOperator> {
    DensityOperator::from_unnormalized(upper_symbol_operator(nu, lambda, basis, method)?)
}

/// Diagonal of the state with Gaussian upper symbol of variance `σ²` at scale 1:
/// `⟨n|Γ|n⟩ = σ^{2n} / (1 + σ²)^{n+1}`, a thermal state.
pub fn gaussian_symbol_populations(sigma_sq: f64, n_max: usize) -> Vec<f64> {
    (0..=n_max).map(|n| (n as f64 * sigma_sq.ln() - (n as f64 + 1.0) * sigma_sq.ln_1p()).exp()).collect()
}
