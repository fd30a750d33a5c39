//! Coherent vectors `ξ(v) = e^{-‖v‖²/2} Σ_n Π_j v_j^{n_j}/√(n_j!) |n⟩` on a truncated Fock space.

use crate::error::{Error, Result};
use crate::fock::FockBasis;
use nalgebra::DVector;
use num_complex::Complex64;
use statrs::function::gamma::{gamma_lr, ln_gamma};

/// Largest truncation defect accepted by [`coherent_vector`].
pub const COHERENT_DEFECT_TOLERANCE: f64 = 1e-8;

/// `P(Poisson(μ) > n_max)`: the squared norm a coherent vector of mean
/// occupation `μ` loses to truncation.
pub fn poisson_tail(n_max: usize, mu: f64) -> f64 {
    if mu <= 0.0 {
        0.0
    } else {
        gamma_lr(n_max as f64 + 1.0, mu)
    }
}

/// Per-mode factors `e^{-|v|²/2} v^n / √n!` for `n ≤ n_max`, computed in
/// log-magnitude form so neither factor overflows on its own.
pub(crate) struct ModeFactors {
    table: Vec<Vec<Complex64>>,
}

impl ModeFactors {
    pub(crate) fn new(v: &[Complex64], n_max: usize) -> Self {
        let table = v
            .iter()
            .map(|vj| {
                let r2 = vj.norm_sqr();
                if r2 == 0.0 {
                    let mut col = vec![Complex64::new(0.0, 0.0); n_max + 1];
                    col[0] = Complex64::new(1.0, 0.0);
                    return col;
                }
                let log_r = 0.5 * r2.ln();
                let phase = vj.arg();
                (0..=n_max)
                    .map(|n| {
                        let nf = n as f64;
                        let log_mag = nf * log_r - 0.5 * ln_gamma(nf + 1.0) - 0.5 * r2;
                        Complex64::from_polar(log_mag.exp(), nf * phase)
                    })
                    .collect()
            })
            .collect();
        Self { table }
    }

    /// Amplitudes `⟨n|ξ(v)⟩` on every basis state.
    pub(crate) fn amplitudes(&self, basis: &FockBasis) -> DVector<Complex64> {
        DVector::from_iterator(
            basis.dim(),
            basis
                .states()
                .iter()
                .map(|s| s.iter().enumerate().map(|(j, &n)| self.table[j][n as usize]).product::<Complex64>()),
        )
    }
}

/// Coherent vector at base point `u` and scale `λ`, i.e. `ξ(u/√λ)`.
#[derive(Debug, Clone)]
pub struct CoherentVector {
    pub base_point: Vec<Complex64>,
    pub scale: f64,
    pub amplitudes: DVector<Complex64>,
    /// `1 - ‖P ξ‖²`, the analytic weight outside the truncated space.
    pub defect: f64,
}

fn rescaled(u: &[Complex64], lambda: f64) -> Vec<Complex64> {
    let s = lambda.sqrt().recip();
    u.iter().map(|x| x * s).collect()
}

/// Exact components of `ξ(u/√λ)` on the truncated basis, without a defect check.
pub fn coherent_amplitudes(u: &[Complex64], lambda: f64, basis: &FockBasis) -> DVector<Complex64> {
    assert_eq!(u.len(), basis.n_modes(), "base point has the wrong number of modes");
    ModeFactors::new(&rescaled(u, lambda), basis.n_max()).amplitudes(basis)
}

/// `ξ(u/√λ)`, rejected when the truncation defect exceeds [`COHERENT_DEFECT_TOLERANCE`].
pub fn coherent_vector(u: &[Complex64], lambda: f64, basis: &FockBasis) -> Result<CoherentVector> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("scale must be positive, got {lambda}")));
    }
    if u.len() != basis.n_modes() {
        return Err(Error::Domain(format!("base point has {} components for {} modes", u.len(), basis.n_modes())));
    }
    let mu: f64 = u.iter().map(|x| x.norm_sqr()).sum::<f64>() / lambda;
    let defect = poisson_tail(basis.n_max(), mu);
    if defect > COHERENT_DEFECT_TOLERANCE {
        return Err(Error::Truncation { defect, tolerance: COHERENT_DEFECT_TOLERANCE, n_max: basis.n_max() });
    }
    Ok(CoherentVector {
        base_point: u.to_vec(),
        scale: lambda,
        amplitudes: coherent_amplitudes(u, lambda, basis),
        defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_ladder, number_operator};
    use crate::spectral::ModeSet;

    #[test]
    fn vacuum_and_mean_occupation() {
        let m = ModeSet::new(1.0).unwrap();
        let b = FockBasis::new(&m, 30).unwrap();
        let vac = coherent_vector(&[Complex64::new(0.0, 0.0)], 1.0, &b).unwrap();
        assert_eq!(vac.amplitudes[0], Complex64::new(1.0, 0.0));
        assert!(vac.amplitudes.iter().skip(1).all(|a| a.norm() == 0.0));

        let xi = coherent_vector(&[Complex64::new(1.0, 0.0)], 1.0, &b).unwrap();
        let n = number_operator(&b);
        let mean = xi.amplitudes.dotc(&n.apply(&xi.amplitudes)).re;
        assert!((mean - 1.0).abs() < 1e-10);
        assert!((xi.amplitudes.norm_squared() + xi.defect - 1.0).abs() < 1e-14);
    }

    #[test]
    fn annihilation_eigenvector() {
        let m = ModeSet::from_modes(vec![[0, 0], [1, 0], [0, -1]]).unwrap();
        let b = FockBasis::new(&m, 14).unwrap();
        let u: Vec<Complex64> = (0..m.len()).map(|j| Complex64::new(0.2 * j as f64, -0.1)).collect();
        let lambda = 0.5;
        let xi = coherent_vector(&u, lambda, &b).unwrap();
        for (j, &uj) in u.iter().enumerate() {
            let (a, _) = build_ladder(&b, j);
            let vj = uj / lambda.sqrt();
            let diff = a.apply(&xi.amplitudes) - &xi.amplitudes * vj;
            assert!(diff.norm() < 1e-8, "mode {j}: {}", diff.norm());
        }
    }

    #[test]
    fn large_displacement_is_rejected() {
        let b = FockBasis::new(&ModeSet::new(1.0).unwrap(), 10).unwrap();
        let err = coherent_vector(&[Complex64::new(3.0, 0.0)], 1.0, &b).unwrap_err();
        assert!(matches!(err, Error::Truncation { n_max: 10, .. }));
    }
}
