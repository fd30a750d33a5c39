//! Deterministic quadrature rules: Gauss–Legendre panels on an interval and
//! polar product rules on the complex plane.

use crate::stats::{log_sum_exp, KahanSum};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use std::f64::consts::PI;

/// `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Golub–Welsch: nodes are the eigenvalues of the Jacobi matrix of the
    /// Legendre recurrence, weights are `2 v₀²` from the normalized eigenvectors.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "a quadrature rule needs at least one node");
        let mut jacobi = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            let k = i as f64;
            let b = k / (4.0 * k * k - 1.0).sqrt();
            jacobi[(i, i - 1)] = b;
            jacobi[(i - 1, i)] = b;
        }
        let eig = SymmetricEigen::new(jacobi);
        let mut pairs: Vec<(f64, f64)> =
            (0..n).map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2))).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() }
    }

    /// Nodes and weights of the rule mapped to `[a, b]`.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (mid + half * x, half * w))
    }
}

/// Composite Gauss–Legendre rule: `panels` equal panels on `[a, b]`.
#[derive(Debug, Clone)]
pub struct Composite {
    pub points: Vec<(f64, f64)>,
}

impl Composite {
    pub fn new(a: f64, b: f64, panels: usize, order: usize) -> Self {
        let rule = GaussLegendre::new(order);
        let h = (b - a) / panels as f64;
        let points = (0..panels)
            .flat_map(|p| {
                let lo = a + p as f64 * h;
                rule.on(lo, lo + h).collect::<Vec<_>>()
            })
            .collect();
        Self { points }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.points.iter().map(|&(x, w)| w * f(x)).collect::<KahanSum>().value()
    }

    /// `log ∫ e^{g(x)} dx`, stable for large `|g|`.
    pub fn log_integrate_exp(&self, g: impl Fn(f64) -> f64) -> f64 {
        let terms: Vec<f64> = self.points.iter().map(|&(x, w)| g(x) + w.ln()).collect();
        log_sum_exp(&terms)
    }
}

/// Product rule on `C` in polar form with `t = |z|²`:
/// `∫_C f(z) d²z = ½ ∫_0^∞ dt ∫_0^{2π} dθ f(√t e^{iθ})`,
/// trapezoid in the angle (spectrally exact for trigonometric polynomials of
/// degree below `angles`) and composite Gauss–Legendre in `t ∈ [0, t_max]`.
#[derive(Debug, Clone)]
pub struct PolarRule {
    pub points: Vec<(Complex64, f64)>,
}

impl PolarRule {
    pub fn new(t_max: f64, panels: usize, order: usize, angles: usize) -> Self {
        let radial = Composite::new(0.0, t_max, panels, order);
        let dtheta = 2.0 * PI / angles as f64;
        let mut points = Vec::with_capacity(radial.points.len() * angles);
        for &(t, w) in &radial.points {
            let r = t.sqrt();
            for j in 0..angles {
                points.push((Complex64::from_polar(r, j as f64 * dtheta), 0.5 * w * dtheta));
            }
        }
        Self { points }
    }

    /// Radial-only rule for rotation-invariant integrands: points `(t, ½·2π·w)`.
    pub fn radial(t_max: f64, panels: usize, order: usize) -> Composite {
        let mut c = Composite::new(0.0, t_max, panels, order);
        for p in c.points.iter_mut() {
            p.1 *= PI;
        }
        c
    }

    pub fn integrate(&self, f: impl Fn(Complex64) -> f64) -> f64 {
        self.points.iter().map(|&(z, w)| w * f(z)).collect::<KahanSum>().value()
    }
}
