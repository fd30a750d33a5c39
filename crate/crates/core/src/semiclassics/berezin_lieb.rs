//! Berezin–Lieb inequalities for convex `f` with `f(0) = 0`:
//!
//! ```text
//! first:   π^{-K} ∫ f(⟨ξ(v), Γ ξ(v)⟩) dv ≤ Tr f(Γ)
//! second:  Tr f(Γ_ν) ≤ π^{-K} ∫ f(π^K ν̃(v)) dv,   Γ_ν = ∫ ν̃(v) |ξ(v)⟩⟨ξ(v)| dv
//! ```
//!
//! Both sides are invariant under the rescaling `u = √λ v`, so everything is
//! evaluated at scale one.

use super::husimi::{DiagonalGaussian, HusimiEvaluator};
use super::upper::{upper_symbol_operator, SymbolIntegration, UpperSymbol};
use crate::error::{Error, Result};
use crate::fock::{reduced_density, DensityOperator, FockBasis};
use crate::quadrature::{Composite, PolarRule};
use crate::stats::{mean_std, sample_stream, KahanSum};
use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Convex test functions, each shifted so that `f(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "shift")]
pub enum ConvexFunction {
    XLogX,
    Square,
    /// `|x - c| - c`.
    AbsShift(f64),
}

impl ConvexFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Self::XLogX => {
                if x > 0.0 {
                    x * x.ln()
                } else {
                    0.0
                }
            }
            Self::Square => x * x,
            Self::AbsShift(c) => (x - c).abs() - c,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::XLogX => "x log x".into(),
            Self::Square => "x^2".into(),
            Self::AbsShift(c) => format!("|x - {c}| - {c}"),
        }
    }
}

/// Which side of the inequality chain is being tested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    First,
    Second,
}

/// Both sides of a Berezin–Lieb inequality; `margin ≥ 0` when it holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerezinLiebReport {
    pub direction: Direction,
    pub function: ConvexFunction,
    pub quantum: f64,
    pub classical: f64,
    /// `quantum - classical` (first) or `classical - quantum` (second).
    pub margin: f64,
    /// Zero for deterministic quadrature.
    pub std_error: f64,
}

/// `Tr f(Γ)` through the spectrum of a Hermitian matrix.
pub fn trace_function(matrix: &nalgebra::DMatrix<Complex64>, f: ConvexFunction) -> f64 {
    let h = (matrix + matrix.adjoint()) * Complex64::new(0.5, 0.0);
    SymmetricEigen::new(h).eigenvalues.iter().map(|&p| f.eval(p.max(0.0))).collect::<KahanSum>().value()
}

fn is_diagonal(g: &DensityOperator) -> bool {
    let m = g.matrix();
    (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)].norm() < 1e-14))
}

/// Classical integral of the first inequality.
pub enum ClassicalMethod {
    /// Deterministic polar quadrature; requires one mode.
    Quadrature,
    MonteCarlo {
        n_samples: usize,
        seed: u64,
    },
}

/// First inequality for a state on the truncated space.
pub fn berezin_lieb_first(
    gamma: &DensityOperator,
    basis: &FockBasis,
    f: ConvexFunction,
    method: ClassicalMethod,
) -> Result<BerezinLiebReport> {
    let eval = HusimiEvaluator::new(gamma, basis, 1.0)?;
    let quantum = trace_function(gamma.matrix(), f);
    let (classical, std_error) = match method {
        ClassicalMethod::Quadrature => {
            if basis.n_modes() != 1 {
                return Err(Error::Unsupported(format!(
                    "deterministic Berezin–Lieb quadrature with K = {}",
                    basis.n_modes()
                )));
            }
            let SymbolIntegration::Quadrature { t_max, panels, order, angles } =
                SymbolIntegration::quadrature_for(basis.n_max())
            else {
                unreachable!()
            };
            if is_diagonal(gamma) {
                // Rotation invariant: π^{-1} ∫ d²v = ∫_0^∞ dt with t = |v|².
                let rule = Composite::new(0.0, t_max, panels, order);
                (rule.integrate(|t| f.eval(eval.overlap(&[Complex64::new(t.sqrt(), 0.0)]))), 0.0)
            } else {
                let rule = PolarRule::new(t_max, panels, order, 2 * angles);
                let vals: Vec<f64> = rule.points.par_iter().map(|&(v, w)| w * f.eval(eval.overlap(&[v]))).collect();
                (vals.into_iter().collect::<KahanSum>().value() / PI, 0.0)
            }
        }
        ClassicalMethod::MonteCarlo { n_samples, seed } => {
            let g1 = reduced_density(gamma, basis, 1)?;
            let prop = DiagonalGaussian::new((0..basis.n_modes()).map(|j| g1[(j, j)].re + 1.0).collect())?;
            let k = basis.n_modes() as i32;
            let vals: Vec<f64> = (0..n_samples as u64)
                .into_par_iter()
                .map(|i| {
                    let v = prop.sample(&mut sample_stream(seed, i));
                    f.eval(eval.overlap(&v)) / (PI.powi(k) * prop.density(&v))
                })
                .collect();
            let (m, s) = mean_std(&vals);
            (m, s / (n_samples as f64).sqrt())
        }
    };
    Ok(BerezinLiebReport {
        direction: Direction::First,
        function: f,
        quantum,
        classical,
        margin: quantum - classical,
        std_error,
    })
}

/// Second inequality for the state with upper symbol `ν` (one mode, deterministic).
///
/// `Γ_ν` is built on `basis`; `n_max` must be large enough that the truncated
/// weight is negligible, which is reported through the trace deficit added to
/// `std_error`.
pub fn berezin_lieb_second(
    nu: &dyn UpperSymbol,
    lambda: f64,
    basis: &FockBasis,
    f: ConvexFunction,
) -> Result<BerezinLiebReport> {
    if basis.n_modes() != 1 {
        return Err(Error::Unsupported(format!("deterministic Berezin–Lieb quadrature with K = {}", basis.n_modes())));
    }
    let method = SymbolIntegration::quadrature_for(basis.n_max());
    let gamma = upper_symbol_operator(nu, lambda, basis, method)?;
    let deficit = (nu.total_mass() - gamma.trace().re).abs();
    let quantum = trace_function(&gamma, f);
    let SymbolIntegration::Quadrature { t_max, panels, order, angles } = method else { unreachable!() };
    let rule = PolarRule::new(t_max, panels, order, angles);
    let sl = lambda.sqrt();
    // π^{-1} ∫ f(π ν̃(v)) dv with ν̃(v) = λ ν(√λ v).
    let classical = rule
        .points
        .iter()
        .map(|&(v, w)| w * f.eval(PI * lambda * nu.density(&[v * sl]).unwrap_or(0.0)))
        .collect::<KahanSum>()
        .value()
        / PI;
    // The truncation drops eigenvalues p ≤ deficit; |f(p)| ≤ deficit·(1 + |log deficit|) for these f.
    let tail = if deficit > 0.0 { deficit * (1.0 + deficit.ln().abs()) } else { 0.0 };
    Ok(BerezinLiebReport {
        direction: Direction::Second,
        function: f,
        quantum,
        classical,
        margin: classical - quantum,
        std_error: tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiclassics::upper::GaussianSymbol;
    use crate::spectral::ModeSet;

    #[test]
    fn maximally_mixed_square() {
        let b = FockBasis::new(&ModeSet::new(1.0).unwrap(), 20).unwrap();
        let g = DensityOperator::from_diagonal(&[1.0 / 21.0; 21]).unwrap();
        let r = berezin_lieb_first(&g, &b, ConvexFunction::Square, ClassicalMethod::Quadrature).unwrap();
        assert!((r.quantum - 1.0 / 21.0).abs() < 1e-15);
        assert!(r.margin > 0.0);
    }

    #[test]
    fn gaussian_second_inequality_entropy_closed_form() {
        let b = FockBasis::new(&ModeSet::new(1.0).unwrap(), 60).unwrap();
        let sigma_sq: f64 = 1.0;
        let lambda = 0.4;
        let nu = GaussianSymbol(DiagonalGaussian::new(vec![lambda * sigma_sq]).unwrap());
        let r = berezin_lieb_second(&nu, lambda, &b, ConvexFunction::XLogX).unwrap();
        let classical = -sigma_sq.ln() - 1.0;
        let quantum = -((1.0 + sigma_sq) * (1.0 + sigma_sq).ln() - sigma_sq * sigma_sq.ln());
        assert!((r.classical - classical).abs() < 1e-10, "{} vs {classical}", r.classical);
        assert!((r.quantum - quantum).abs() < 1e-10, "{} vs {quantum}", r.quantum);
        assert!(r.margin >= 0.0);
    }

    #[test]
    fn shifted_abs_is_zero_at_origin() {
        assert_eq!(ConvexFunction::AbsShift(0.3).eval(0.0), 0.0);
        assert_eq!(ConvexFunction::XLogX.eval(0.0), 0.0);
    }
}
