//! Mode lattice, dispersion, truncated Green function, interaction potential
//! and renormalization constants.
//!
//! The torus is `[0, 2π]²` with dual lattice `Z²`, so plane waves `e^{ik·x}`,
//! `k ∈ Z²`, are periodic and `h = -Δ + 1` has eigenvalues `λ_k = |k|² + 1`.
//! Field coefficients multiply unnormalized plane waves,
//! `u(x) = Σ_k α_k e^{ik·x}`, while one-particle Fock modes are the orthonormal
//! vectors `φ_k = e^{ik·x} / √V` for the torus measure of total mass `V`.
//!
//! Every integral over the torus is taken against a measure of total mass
//! [`RenormConstants::volume`]: `(2π)²` for Lebesgue measure
//! ([`LEBESGUE_VOLUME`]) or `1` for the normalized Haar measure
//! ([`UNIT_VOLUME`]). With `F[f](k) = (2π)^{-2} ∫ f e^{-ik·x} dx` the normalized
//! Fourier coefficient, all volume powers enter only as
//!
//! ```text
//! ∫ f e^{-ik·x} = V F[f](k),    ∫∫ w(x-y) f(x) g(y) = V² Σ_k ŵ_k F[f](k) F[g](-k).
//! ```

use crate::error::{Error, Result};
use crate::fft::{self, Fft2};
use crate::stats::KahanSum;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Mass of Lebesgue measure on `[0, 2π]²`.
pub const LEBESGUE_VOLUME: f64 = 4.0 * PI * PI;
/// Mass of the normalized torus measure `dx / (2π)²`.
pub const UNIT_VOLUME: f64 = 1.0;

/// A lattice vector of `Z²`.
pub type Mode = [i64; 2];

#[inline]
pub fn mode_norm_sq(k: Mode) -> i64 {
    k[0] * k[0] + k[1] * k[1]
}

#[inline]
pub fn dispersion(k: Mode) -> f64 {
    (mode_norm_sq(k) + 1) as f64
}

/// The Fourier modes `{k ∈ Z² : |k|² + 1 ≤ Λ}` in lexicographic order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSet {
    cutoff: f64,
    modes: Vec<Mode>,
    eigenvalues: Vec<f64>,
}

impl ModeSet {
    /// Spectral projector `1_{h ≤ Λ}`. `Λ < 1` would exclude `k = 0` and is rejected.
    pub fn new(cutoff: f64) -> Result<Self> {
        if !(cutoff >= 1.0) || !cutoff.is_finite() {
            return Err(Error::Domain(format!("cutoff Λ = {cutoff} must be a finite number ≥ 1")));
        }
        let bound = (cutoff - 1.0).floor() as i64;
        let r = (bound as f64).sqrt().floor() as i64 + 1;
        let mut modes = Vec::new();
        for a in -r..=r {
            for b in -r..=r {
                if a * a + b * b <= bound {
                    modes.push([a, b]);
                }
            }
        }
        let eigenvalues = modes.iter().map(|&k| dispersion(k)).collect();
        Ok(Self { cutoff, modes, eigenvalues })
    }

    /// An explicit list of modes, e.g. a non-spectral subset used for small
    /// Fock computations. The list is sorted; duplicates are rejected.
    pub fn from_modes(mut modes: Vec<Mode>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::Domain("empty mode list".into()));
        }
        modes.sort();
        if modes.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Domain("duplicate modes in explicit list".into()));
        }
        let eigenvalues: Vec<f64> = modes.iter().map(|&k| dispersion(k)).collect();
        let cutoff = eigenvalues.iter().copied().fold(1.0, f64::max);
        Ok(Self { cutoff, modes, eigenvalues })
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn index_of(&self, k: Mode) -> Option<usize> {
        self.modes.binary_search(&k).ok()
    }

    pub fn contains(&self, k: Mode) -> bool {
        self.index_of(k).is_some()
    }

    /// Largest `|k_i|` over all modes and both axes.
    pub fn max_index(&self) -> usize {
        self.modes.iter().map(|k| k[0].unsigned_abs().max(k[1].unsigned_abs())).max().unwrap_or(0) as usize
    }

    /// `k ∈ modes ⇔ -k ∈ modes`.
    pub fn is_symmetric(&self) -> bool {
        self.modes.iter().all(|&[a, b]| self.contains([-a, -b]))
    }

    pub fn is_subset_of(&self, other: &ModeSet) -> bool {
        self.modes.iter().all(|&k| other.contains(k))
    }

    /// All differences `m - n`, `m, n ∈ modes`, sorted and deduplicated.
    pub fn differences(&self) -> Vec<Mode> {
        let mut out: Vec<Mode> =
            self.modes.iter().flat_map(|&m| self.modes.iter().map(move |&n| [m[0] - n[0], m[1] - n[1]])).collect();
        out.sort();
        out.dedup();
        out
    }
}

/// Shape of the unscaled potential `ŵ(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum PotentialFamily {
    /// `ŵ(k) = exp(-width · |k|²)`.
    Gaussian { width: f64 },
    /// `ŵ(k) = (1 + |k|²)^{-exponent}`; the smoothness sum is finite for `exponent > 2`.
    Power { exponent: f64 },
}

impl PotentialFamily {
    /// `ŵ` at a real wave vector.
    pub fn eval(&self, q: [f64; 2]) -> f64 {
        let q2 = q[0] * q[0] + q[1] * q[1];
        match *self {
            PotentialFamily::Gaussian { width } => (-width * q2).exp(),
            PotentialFamily::Power { exponent } => (1.0 + q2).powf(-exponent),
        }
    }

    /// Whether `ŵ` is a nonincreasing function of `|k|`.
    pub fn is_radially_nonincreasing(&self) -> bool {
        match *self {
            PotentialFamily::Gaussian { width } => width >= 0.0,
            PotentialFamily::Power { exponent } => exponent >= 0.0,
        }
    }
}

/// The regularized interaction `w^ε(x) = Σ_k ŵ(εk) e^{ik·x}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub family: PotentialFamily,
    pub epsilon: f64,
    /// Upper bound required of `Σ_k ŵ(k)(1 + |k|²)`.
    pub smoothness_budget: f64,
}

/// Radius of the window on which [`PotentialSpec::validate`] inspects `ŵ`.
const SMOOTHNESS_RADIUS: i64 = 256;

impl PotentialSpec {
    pub fn new(family: PotentialFamily, epsilon: f64) -> Self {
        Self { family, epsilon, smoothness_budget: 1.0e6 }
    }

    pub fn gaussian(epsilon: f64) -> Self {
        Self::new(PotentialFamily::Gaussian { width: 1.0 }, epsilon)
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        Self { epsilon, ..*self }
    }

    /// `ŵ(k)` without the range scaling.
    pub fn w_hat(&self, k: Mode) -> f64 {
        self.family.eval([k[0] as f64, k[1] as f64])
    }

    /// `ŵ(εk)`, the Fourier coefficient of `w^ε`.
    pub fn w_hat_eps(&self, k: Mode) -> f64 {
        self.family.eval([self.epsilon * k[0] as f64, self.epsilon * k[1] as f64])
    }

    /// `w^ε(x)` summed over all `k` with `ŵ(εk) > tol · ŵ(0)`.
    pub fn w_eps_at(&self, x: [f64; 2], tol: f64) -> f64 {
        let r = self.effective_radius(tol);
        let mut acc = KahanSum::new();
        for a in -r..=r {
            for b in -r..=r {
                let w = self.w_hat_eps([a, b]);
                if w > tol {
                    acc.add(w * (a as f64 * x[0] + b as f64 * x[1]).cos());
                }
            }
        }
        acc.value()
    }

    /// Radius beyond which `ŵ(εk) ≤ tol` along the axes.
    pub fn effective_radius(&self, tol: f64) -> i64 {
        let mut r = 1i64;
        while self.w_hat_eps([r, 0]) > tol {
            r *= 2;
            if r > 1 << 24 {
                break;
            }
        }
        r
    }

    /// Truncated `Σ_{|k|_∞ ≤ radius} ŵ(k)(1 + |k|²)`.
    pub fn smoothness_sum(&self, radius: i64) -> f64 {
        let mut acc = KahanSum::new();
        for a in -radius..=radius {
            for b in -radius..=radius {
                let k = [a, b];
                acc.add(self.w_hat(k) * dispersion(k));
            }
        }
        acc.value()
    }

    /// Checks `ŵ(0) = 1`, `ŵ ≥ 0`, `ŵ(k) = ŵ(-k)`, `ε ∈ (0, 1]` and the smoothness budget.
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::Domain(format!("ε = {} must lie in (0, 1]", self.epsilon)));
        }
        if (self.w_hat([0, 0]) - 1.0).abs() > 1e-15 {
            return Err(Error::Domain("ŵ(0) must equal 1".into()));
        }
        let r = 32;
        for a in -r..=r {
            for b in -r..=r {
                let w = self.w_hat([a, b]);
                if !(w >= 0.0) {
                    return Err(Error::Domain(format!("ŵ({a},{b}) = {w} < 0")));
                }
                if w != self.w_hat([-a, -b]) {
                    return Err(Error::Domain(format!("ŵ is not even at ({a},{b})")));
                }
            }
        }
        let half = self.smoothness_sum(SMOOTHNESS_RADIUS / 2);
        let full = self.smoothness_sum(SMOOTHNESS_RADIUS);
        if !full.is_finite() || full > self.smoothness_budget || (full - half) > 1e-2 * full {
            return Err(Error::Domain(format!(
                "Σ ŵ(k)(1+|k|²) = {full} (radius {SMOOTHNESS_RADIUS}) is not within the budget {}",
                self.smoothness_budget
            )));
        }
        Ok(())
    }
}

/// Counterterms and reference constants at fixed `(ε, Λ, λ, V)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenormConstants {
    /// Wick mass `⟨|P_K u(x)|²⟩_{μ₀} = Σ_k 1/λ_k`.
    pub c_k: f64,
    /// `τ^ε_K = ∫ w^ε G_K = V Σ_k ŵ(εk)/λ_k`.
    pub tau: f64,
    /// `E^ε_K = ½ ∫∫ w^ε(x-y) G_K(x-y)² = ½ V² Σ_k ŵ(εk) F[G_K²](k)`.
    pub e_const: f64,
    /// Projected free particle number `N₀^P = Σ_k 1/(e^{λ λ_k} - 1)`.
    pub n0: f64,
    pub lambda: f64,
    pub volume: f64,
    pub epsilon: f64,
    pub modes: usize,
}

/// `G_K(x) = Σ_{k ∈ m} e^{ik·x} / λ_k`.
pub fn green_truncated(x: [f64; 2], m: &ModeSet) -> f64 {
    let mut re = KahanSum::new();
    let mut im = KahanSum::new();
    for (k, &l) in m.modes().iter().zip(m.eigenvalues()) {
        let ph = k[0] as f64 * x[0] + k[1] as f64 * x[1];
        re.add(ph.cos() / l);
        im.add(ph.sin() / l);
    }
    debug_assert!(
        !m.is_symmetric() || im.value().abs() < 1e-12 * (1.0 + m.len() as f64).sqrt(),
        "imaginary part {} of a symmetric Green function",
        im.value()
    );
    re.value()
}

/// `Σ_k 1/λ_k`.
pub fn wick_mass(m: &ModeSet) -> f64 {
    m.eigenvalues().iter().map(|&l| 1.0 / l).collect::<KahanSum>().value()
}

/// `Σ_k 1/(e^{λ λ_k} - 1)` over the projected modes.
pub fn projected_n0(m: &ModeSet, lambda: f64) -> f64 {
    m.eigenvalues().iter().map(|&l| 1.0 / (lambda * l).exp_m1()).collect::<KahanSum>().value()
}

/// Above this many modes `E^ε_K` is computed through a 2D FFT convolution
/// instead of the direct double sum.
const DIRECT_CONVOLUTION_LIMIT: usize = 3000;

/// `Σ_s ŵ(εs) Σ_{p+q=s} 1/(λ_p λ_q)`, the Fourier form of `∫ w^ε G_K²` per unit volume².
pub fn smeared_green_square(m: &ModeSet, p: &PotentialSpec) -> f64 {
    if m.len() <= DIRECT_CONVOLUTION_LIMIT {
        smeared_green_square_direct(m, p)
    } else {
        smeared_green_square_fft(m, p)
    }
}

fn smeared_green_square_direct(m: &ModeSet, p: &PotentialSpec) -> f64 {
    let mut acc = KahanSum::new();
    for (a, &la) in m.modes().iter().zip(m.eigenvalues()) {
        for (b, &lb) in m.modes().iter().zip(m.eigenvalues()) {
            acc.add(p.w_hat_eps([a[0] + b[0], a[1] + b[1]]) / (la * lb));
        }
    }
    acc.value()
}

fn smeared_green_square_fft(m: &ModeSet, p: &PotentialSpec) -> f64 {
    // Linear convolution of the support |k_i| ≤ M spans |s_i| ≤ 2M; a period of
    // at least 4M + 1 keeps every s unaliased.
    let big_m = m.max_index() as i64;
    let n = fft::next_smooth(4 * big_m as usize + 1);
    let mut buf = vec![Complex64::new(0.0, 0.0); n * n];
    for (k, &l) in m.modes().iter().zip(m.eigenvalues()) {
        buf[fft::wrap(k[0], n) * n + fft::wrap(k[1], n)] = Complex64::new(1.0 / l, 0.0);
    }
    let plan = Fft2::new(n);
    plan.forward(&mut buf);
    for v in buf.iter_mut() {
        *v = *v * *v;
    }
    plan.inverse(&mut buf);
    let norm = 1.0 / (n as f64 * n as f64);
    let mut acc = KahanSum::new();
    for i in 0..n {
        let s0 = fft::unwrap(i, n);
        if s0.abs() > 2 * big_m {
            continue;
        }
        for j in 0..n {
            let s1 = fft::unwrap(j, n);
            if s1.abs() > 2 * big_m {
                continue;
            }
            acc.add(p.w_hat_eps([s0, s1]) * buf[i * n + j].re * norm);
        }
    }
    acc.value()
}

/// All renormalization constants for the mode set `m`, potential `p`,
/// inverse temperature `λ` and torus volume `V`.
pub fn renorm_constants(m: &ModeSet, p: &PotentialSpec, lambda: f64, volume: f64) -> Result<RenormConstants> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("λ = {lambda} must be positive")));
    }
    if !(volume > 0.0) {
        return Err(Error::Domain(format!("volume {volume} must be positive")));
    }
    let (tau, e_const) = counterterms(m, p, volume);
    Ok(RenormConstants {
        c_k: wick_mass(m),
        tau,
        e_const,
        n0: projected_n0(m, lambda),
        lambda,
        volume,
        epsilon: p.epsilon,
        modes: m.len(),
    })
}

/// `(τ^ε_K, E^ε_K)` for torus volume `V`.
fn counterterms(m: &ModeSet, p: &PotentialSpec, volume: f64) -> (f64, f64) {
    let tau =
        volume * m.modes().iter().zip(m.eigenvalues()).map(|(&k, &l)| p.w_hat_eps(k) / l).collect::<KahanSum>().value();
    (tau, 0.5 * volume * volume * smeared_green_square(m, p))
}

/// One row of [`counterterm_asymptotics`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountertermRow {
    pub epsilon: f64,
    pub cutoff: f64,
    pub modes: usize,
    pub tau: f64,
    pub e_const: f64,
    /// `τ^ε_K / |log ε|`.
    pub tau_ratio: f64,
    /// `E^ε_K / |log ε|²`.
    pub e_ratio: f64,
}

/// `τ^ε_K` and `E^ε_K` along `Λ = cutoff_factor · ε^{-2}`, normalized by their
/// expected logarithmic growth.
pub fn counterterm_asymptotics(
    epsilons: &[f64],
    potential: &PotentialSpec,
    cutoff_factor: f64,
    volume: f64,
) -> Result<Vec<CountertermRow>> {
    if !(cutoff_factor >= 1.0) {
        return Err(Error::Domain(format!("cutoff factor {cutoff_factor} must be ≥ 1")));
    }
    epsilons
        .iter()
        .map(|&epsilon| {
            if !(epsilon > 0.0 && epsilon < 1.0) {
                return Err(Error::Domain(format!("ε = {epsilon} must lie in (0, 1)")));
            }
            let p = potential.with_epsilon(epsilon);
            let cutoff = cutoff_factor / (epsilon * epsilon);
            let m = ModeSet::new(cutoff)?;
            let (tau, e_const) = counterterms(&m, &p, volume);
            let log_eps = epsilon.ln().abs();
            Ok(CountertermRow {
                epsilon,
                cutoff,
                modes: m.len(),
                tau,
                e_const,
                tau_ratio: tau / log_eps,
                e_ratio: e_const / (log_eps * log_eps),
            })
        })
        .collect()
}

/// `|r_{i+1}/r_i - 1|` for consecutive entries.
pub fn successive_drift(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| (w[1] / w[0] - 1.0).abs()).collect()
}

/// Full-lattice `N₀ = Σ_{k ∈ Z²} 1/(e^{λ(|k|²+1)} - 1)`.
///
/// Summed over square shells `max(|k₀|,|k₁|) = s` using the eightfold lattice
/// symmetry; stops once a shell contributes less than `1e-12` of the running
/// total past the peak of the shell profile.
pub fn full_lattice_n0(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("λ = {lambda} must be positive")));
    }
    let term = |a: i64, b: i64| 1.0 / (lambda * ((a * a + b * b + 1) as f64)).exp_m1();
    let mut total = KahanSum::new();
    total.add(term(0, 0));
    let mut s = 1i64;
    let mut prev = f64::INFINITY;
    loop {
        let mut shell = KahanSum::new();
        // points (±s, b), (b, ±s): b = 0 and b = s have 4 images, 0 < b < s has 8.
        shell.add(4.0 * term(s, 0));
        for b in 1..s {
            shell.add(8.0 * term(s, b));
        }
        shell.add(4.0 * term(s, s));
        let v = shell.value();
        total.add(v);
        if v < 1e-13 * total.value() && v <= prev {
            break;
        }
        prev = v;
        s += 1;
    }
    Ok(total.value())
}

/// One row of [`n0_asymptotics_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct N0Row {
    pub lambda: f64,
    pub n0_full: f64,
    /// `N₀ λ / (|log λ| · (2π)²)`: the particle number per unit area in units of
    /// `λ^{-1} |log λ|`; tends to `1/(4π)`.
    pub coefficient: f64,
}

/// Full-lattice `N₀(λ)` and its log-divergence coefficient per unit area.
pub fn n0_asymptotics_check(lambdas: &[f64]) -> Result<Vec<N0Row>> {
    lambdas
        .iter()
        .map(|&lambda| {
            if !(lambda > 0.0 && lambda < 1.0) {
                return Err(Error::Domain(format!("λ = {lambda} must lie in (0, 1)")));
            }
            let n0_full = full_lattice_n0(lambda)?;
            Ok(N0Row { lambda, n0_full, coefficient: n0_full * lambda / (lambda.ln().abs() * LEBESGUE_VOLUME) })
        })
        .collect()
}
