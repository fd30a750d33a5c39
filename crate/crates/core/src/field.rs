//! Projected Gaussian free field and the interaction functionals evaluated on
//! its samples.
//!
//! For a sample `u(x) = Σ_k α_k e^{ik·x}` and the Wick density
//! `ρ = |u|² - c_K`, this module evaluates
//!
//! ```text
//! W^ε_K = ½ V² Σ_k ŵ(εk) |F[ρ](k)|² - τ V F[ρ](0) - E
//! V_K   = ½ ∫ (|u|⁴ - 4 c_K |u|² + 2 c_K²)
//! V^ε_K = ½ ∫∫ w^ε(x-y) :|u(x)|² |u(y)|²:
//! I^ε_K = V² Σ_r (ĝ_0 - ĝ_r)(|α_r|² - 1/λ_r),   ĝ_r = Σ_q ŵ(ε(r-q)) / λ_q
//! ```
//!
//! so that `V^ε_K = W^ε_K + I^ε_K` holds sample by sample. `ĝ` is the Fourier
//! series of `w^ε G_K`, and `I^ε_K = ∫∫ w^ε G_K (:|u(x)|²: - :ū(x)u(y):)`.
//!
//! Quartic functionals are evaluated on an `n × n` grid with `n ≥ 4M + 2`,
//! where `M` is the largest mode index; this keeps every Fourier coefficient of
//! `|u|²` unaliased and grid quadrature of `|u|⁴` exact.

use crate::error::{Error, Result};
use crate::fft::{self, Fft2};
use crate::spectral::{Mode, ModeSet, PotentialSpec, RenormConstants};
use crate::stats::{sample_stream, KahanSum};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::collections::HashMap;

/// One draw of the projected free field: coefficients `α_k` of `e^{ik·x}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    pub alpha: Vec<Complex64>,
}

impl FieldSample {
    pub fn zero(m: &ModeSet) -> Self {
        Self { alpha: vec![Complex64::new(0.0, 0.0); m.len()] }
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    /// `Σ |α_k|²`, the spatial mean of `|u|²`.
    pub fn mass(&self) -> f64 {
        self.alpha.iter().map(|a| a.norm_sqr()).collect::<KahanSum>().value()
    }

    /// `u(x)` by direct summation.
    pub fn value_at(&self, m: &ModeSet, x: [f64; 2]) -> Complex64 {
        let mut re = KahanSum::new();
        let mut im = KahanSum::new();
        for (a, k) in self.alpha.iter().zip(m.modes()) {
            let v = a * Complex64::from_polar(1.0, k[0] as f64 * x[0] + k[1] as f64 * x[1]);
            re.add(v.re);
            im.add(v.im);
        }
        Complex64::new(re.value(), im.value())
    }
}

/// Draw sample number `index` of the stream `seed` from `μ₀,K`:
/// `α_k = (ξ₁ + iξ₂) / √(2 λ_k)` with independent standard normals.
pub fn sample_free_field(m: &ModeSet, seed: u64, index: u64) -> FieldSample {
    let mut rng = sample_stream(seed, index);
    let alpha = m
        .eigenvalues()
        .iter()
        .map(|&l| {
            let s = (2.0 * l).sqrt().recip();
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re * s, im * s)
        })
        .collect();
    FieldSample { alpha }
}

/// Values of a field on the uniform `n × n` grid `x = 2π (i, j) / n`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub n_grid: usize,
    pub values: Vec<Complex64>,
}

impl GridField {
    /// Synthesize `u` on the grid. Needs `n ≥ 2M + 1` so that every mode has its own slot.
    pub fn from_sample(f: &FieldSample, m: &ModeSet, n_grid: usize) -> Result<Self> {
        check_grid(m, n_grid, 2)?;
        let plan = Fft2::new(n_grid);
        Ok(Self { n_grid, values: synthesize(f, m, &plan) })
    }

    /// Recover the mode coefficients of a band-limited grid field.
    pub fn to_sample(&self, m: &ModeSet) -> FieldSample {
        let n = self.n_grid;
        let mut buf = self.values.clone();
        Fft2::new(n).forward(&mut buf);
        let norm = 1.0 / (n * n) as f64;
        FieldSample { alpha: m.modes().iter().map(|k| buf[slot(*k, n)] * norm).collect() }
    }

    /// Grid average, i.e. `(2π)^{-2} ∫ u` for band-limited `u`.
    pub fn mean(&self) -> Complex64 {
        let re: KahanSum = self.values.iter().map(|v| v.re).collect();
        let im: KahanSum = self.values.iter().map(|v| v.im).collect();
        Complex64::new(re.value(), im.value()) / self.values.len() as f64
    }
}

#[inline]
fn slot(k: Mode, n: usize) -> usize {
    fft::wrap(k[0], n) * n + fft::wrap(k[1], n)
}

fn check_grid(m: &ModeSet, n_grid: usize, factor: usize) -> Result<()> {
    let need = factor * m.max_index() + 2;
    if !n_grid.is_power_of_two() || n_grid < need {
        return Err(Error::Config(format!(
            "grid size {n_grid} aliases: need a power of two ≥ {need} ({factor}× oversampling of max mode index {})",
            m.max_index()
        )));
    }
    Ok(())
}

/// Smallest admissible grid for the quartic functionals.
pub fn quartic_grid_size(m: &ModeSet) -> usize {
    (4 * m.max_index() + 2).next_power_of_two()
}

fn synthesize(f: &FieldSample, m: &ModeSet, plan: &Fft2) -> Vec<Complex64> {
    let n = plan.size();
    assert_eq!(f.len(), m.len(), "sample does not match the mode set");
    let mut buf = vec![Complex64::new(0.0, 0.0); n * n];
    for (a, k) in f.alpha.iter().zip(m.modes()) {
        buf[slot(*k, n)] = *a;
    }
    plan.inverse(&mut buf);
    buf
}

/// `ρ(x) = |u(x)|² - c_K` on the grid (imaginary parts are zero).
pub fn wick_density(f: &FieldSample, m: &ModeSet, c_k: f64, n_grid: usize) -> Result<GridField> {
    let mut g = GridField::from_sample(f, m, n_grid)?;
    for v in g.values.iter_mut() {
        *v = Complex64::new(v.norm_sqr() - c_k, 0.0);
    }
    Ok(g)
}

/// All four functionals of one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionValues {
    /// `W^ε_K`.
    pub w: f64,
    /// `V_K`, the local Wick-ordered quartic.
    pub v_local: f64,
    /// `V^ε_K`, the smeared Wick-ordered quartic.
    pub v_smeared: f64,
    /// `I^ε_K`.
    pub cross: f64,
    /// `½ V² Σ ŵ(εk) |F[ρ](k)|²`, the nonnegative part of `W`.
    pub quadratic: f64,
}

/// Which functional a Monte Carlo run integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    W,
    V,
    VSmeared,
    Cross,
}

impl InteractionValues {
    pub fn get(&self, which: Functional) -> f64 {
        match which {
            Functional::W => self.w,
            Functional::V => self.v_local,
            Functional::VSmeared => self.v_smeared,
            Functional::Cross => self.cross,
        }
    }
}

/// Precomputed evaluator of the interaction functionals for one `(K, ε, V)`.
pub struct Interactions {
    modes: ModeSet,
    rc: RenormConstants,
    n_grid: usize,
    plan: Fft2,
    /// `ŵ(εk)` at each grid slot of the support `|k_i| ≤ 2M`, zero elsewhere.
    w_grid: Vec<f64>,
    w0: f64,
    /// `ĝ_r` for `r` in mode order.
    g_hat: Vec<f64>,
    g_hat_zero: f64,
}

impl Interactions {
    pub fn new(m: &ModeSet, p: &PotentialSpec, rc: &RenormConstants, n_grid: usize) -> Result<Self> {
        check_grid(m, n_grid, 4)?;
        if rc.modes != m.len() || rc.epsilon != p.epsilon {
            return Err(Error::Config("renormalization constants were built for a different mode set or ε".into()));
        }
        let n = n_grid;
        let support = 2 * m.max_index() as i64;
        let mut w_grid = vec![0.0; n * n];
        for i in 0..n {
            let k0 = fft::unwrap(i, n);
            for j in 0..n {
                let k1 = fft::unwrap(j, n);
                if k0.abs() <= support && k1.abs() <= support {
                    w_grid[i * n + j] = p.w_hat_eps([k0, k1]);
                }
            }
        }
        let g_at = |r: Mode| -> f64 {
            m.modes()
                .iter()
                .zip(m.eigenvalues())
                .map(|(q, &l)| p.w_hat_eps([r[0] - q[0], r[1] - q[1]]) / l)
                .collect::<KahanSum>()
                .value()
        };
        let g_hat = m.modes().iter().map(|&r| g_at(r)).collect();
        Ok(Self {
            modes: m.clone(),
            rc: *rc,
            n_grid,
            plan: Fft2::new(n),
            w_grid,
            w0: p.w_hat_eps([0, 0]),
            g_hat,
            g_hat_zero: g_at([0, 0]),
        })
    }

    /// Evaluator on the smallest admissible grid.
    pub fn with_default_grid(m: &ModeSet, p: &PotentialSpec, rc: &RenormConstants) -> Result<Self> {
        Self::new(m, p, rc, quartic_grid_size(m))
    }

    pub fn n_grid(&self) -> usize {
        self.n_grid
    }

    pub fn modes(&self) -> &ModeSet {
        &self.modes
    }

    pub fn constants(&self) -> &RenormConstants {
        &self.rc
    }

    /// Fourier coefficients `ĝ_r` of `w^ε G_K` on the mode set.
    pub fn g_hat(&self) -> &[f64] {
        &self.g_hat
    }

    pub fn evaluate(&self, f: &FieldSample) -> InteractionValues {
        let n = self.n_grid;
        let vol = self.rc.volume;
        let c = self.rc.c_k;
        let u = synthesize(f, &self.modes, &self.plan);

        // ½ ∫ :|u|⁴: by exact grid quadrature.
        let mut quartic = KahanSum::new();
        let mut dens: Vec<Complex64> = Vec::with_capacity(n * n);
        for v in &u {
            let s = v.norm_sqr();
            quartic.add(s * s - 4.0 * c * s + 2.0 * c * c);
            dens.push(Complex64::new(s, 0.0));
        }
        let v_local = 0.5 * vol * quartic.value() / (n * n) as f64;

        // F[|u|²] on all slots.
        self.plan.forward(&mut dens);
        let norm = 1.0 / (n * n) as f64;
        let mut smeared = KahanSum::new();
        for (d, &w) in dens.iter().zip(&self.w_grid) {
            if w != 0.0 {
                smeared.add(w * (d * norm).norm_sqr());
            }
        }
        let mass_hat = dens[0].re * norm;
        // |F[ρ](k)|² differs from |F[|u|²](k)|² only at k = 0.
        let rho0 = mass_hat - c;
        let quadratic = 0.5 * vol * vol * (smeared.value() - self.w0 * mass_hat * mass_hat + self.w0 * rho0 * rho0);
        let w = quadratic - self.rc.tau * vol * rho0 - self.rc.e_const;

        let mut g_mass = KahanSum::new();
        let mut cross = KahanSum::new();
        for ((a, &g), &l) in f.alpha.iter().zip(&self.g_hat).zip(self.modes.eigenvalues()) {
            let s = a.norm_sqr();
            g_mass.add(g * s);
            cross.add((self.g_hat_zero - g) * (s - 1.0 / l));
        }
        let v_smeared =
            0.5 * vol * vol * smeared.value() - c * vol * vol * self.w0 * mass_hat - vol * vol * g_mass.value()
                + 0.5 * c * c * vol * vol * self.w0
                + self.rc.e_const;

        InteractionValues { w, v_local, v_smeared, cross: vol * vol * cross.value(), quadratic }
    }

    /// Lower bound `W ≥ -τ²/(2 ŵ(0)) - E` from completing the square in the `k = 0` term.
    pub fn young_bound(&self) -> f64 {
        -self.rc.tau * self.rc.tau / (2.0 * self.w0) - self.rc.e_const
    }
}

pub fn interaction_w(
    f: &FieldSample,
    m: &ModeSet,
    p: &PotentialSpec,
    rc: &RenormConstants,
    n_grid: usize,
) -> Result<f64> {
    Ok(Interactions::new(m, p, rc, n_grid)?.evaluate(f).w)
}

pub fn interaction_v_local(f: &FieldSample, m: &ModeSet, c_k: f64, volume: f64, n_grid: usize) -> Result<f64> {
    check_grid(m, n_grid, 4)?;
    let g = GridField::from_sample(f, m, n_grid)?;
    let acc: KahanSum = g
        .values
        .iter()
        .map(|v| {
            let s = v.norm_sqr();
            s * s - 4.0 * c_k * s + 2.0 * c_k * c_k
        })
        .collect();
    Ok(0.5 * volume * acc.value() / (n_grid * n_grid) as f64)
}

pub fn interaction_v_smeared(
    f: &FieldSample,
    m: &ModeSet,
    p: &PotentialSpec,
    rc: &RenormConstants,
    n_grid: usize,
) -> Result<f64> {
    Ok(Interactions::new(m, p, rc, n_grid)?.evaluate(f).v_smeared)
}

pub fn cross_term_i(
    f: &FieldSample,
    m: &ModeSet,
    p: &PotentialSpec,
    rc: &RenormConstants,
    n_grid: usize,
) -> Result<f64> {
    Ok(Interactions::new(m, p, rc, n_grid)?.evaluate(f).cross)
}

/// `‖I^ε_K‖_{L²(μ₀,K)}` in closed form: the modes are independent with
/// `Var |α_r|² = λ_r^{-2}`.
pub fn cross_term_l2_norm(ev: &Interactions) -> f64 {
    let vol = ev.rc.volume;
    let s: KahanSum = ev
        .g_hat
        .iter()
        .zip(ev.modes.eigenvalues())
        .map(|(&g, &l)| {
            let d = ev.g_hat_zero - g;
            d * d / (l * l)
        })
        .collect();
    vol * vol * s.value().sqrt()
}

/// Direct `O(K²)` Fourier-sum evaluation of the functionals, independent of the FFT path.
pub mod direct {
    use super::*;

    /// `F[|u|²](k) = Σ_{b - a = k} ᾱ_a α_b` on its support.
    pub fn density_coefficients(f: &FieldSample, m: &ModeSet) -> HashMap<Mode, Complex64> {
        let mut out: HashMap<Mode, Complex64> = HashMap::new();
        for (aa, ka) in f.alpha.iter().zip(m.modes()) {
            for (ab, kb) in f.alpha.iter().zip(m.modes()) {
                *out.entry([kb[0] - ka[0], kb[1] - ka[1]]).or_insert(Complex64::new(0.0, 0.0)) += aa.conj() * ab;
            }
        }
        out
    }

    pub fn evaluate(f: &FieldSample, m: &ModeSet, p: &PotentialSpec, rc: &RenormConstants) -> InteractionValues {
        let vol = rc.volume;
        let c = rc.c_k;
        let coeffs = density_coefficients(f, m);
        let zero = Complex64::new(0.0, 0.0);
        let mass = coeffs.get(&[0, 0]).copied().unwrap_or(zero).re;
        let mut keys: Vec<&Mode> = coeffs.keys().collect();
        keys.sort();
        let mut quad_rho = KahanSum::new();
        let mut quad_mass = KahanSum::new();
        let mut parseval = KahanSum::new();
        for k in keys {
            let v = coeffs[k];
            let w = p.w_hat_eps(*k);
            let rho = if *k == [0, 0] { v - c } else { v };
            quad_rho.add(w * rho.norm_sqr());
            quad_mass.add(w * v.norm_sqr());
            parseval.add(v.norm_sqr());
        }
        let quadratic = 0.5 * vol * vol * quad_rho.value();
        let w = quadratic - rc.tau * vol * (mass - c) - rc.e_const;
        let v_local = 0.5 * vol * (parseval.value() - 4.0 * c * mass + 2.0 * c * c);
        let w0 = p.w_hat_eps([0, 0]);
        let g = |r: Mode| -> f64 {
            m.modes().iter().zip(m.eigenvalues()).map(|(q, &l)| p.w_hat_eps([r[0] - q[0], r[1] - q[1]]) / l).sum()
        };
        let g0 = g([0, 0]);
        let mut g_mass = 0.0;
        let mut cross = 0.0;
        for ((a, k), &l) in f.alpha.iter().zip(m.modes()).zip(m.eigenvalues()) {
            let gr = g(*k);
            g_mass += gr * a.norm_sqr();
            cross += (g0 - gr) * (a.norm_sqr() - 1.0 / l);
        }
        let v_smeared = 0.5 * vol * vol * quad_mass.value() - c * vol * vol * w0 * mass - vol * vol * g_mass
            + 0.5 * c * c * vol * vol * w0
            + rc.e_const;
        InteractionValues { w, v_local, v_smeared, cross: vol * vol * cross, quadratic }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{renorm_constants, LEBESGUE_VOLUME, UNIT_VOLUME};
    use approx::assert_relative_eq;

    fn setup(cutoff: f64, eps: f64, vol: f64) -> (ModeSet, PotentialSpec, RenormConstants) {
        let m = ModeSet::new(cutoff).unwrap();
        let p = PotentialSpec::gaussian(eps);
        let rc = renorm_constants(&m, &p, 0.5, vol).unwrap();
        (m, p, rc)
    }

    #[test]
    fn sampler_variance_single_mode() {
        let m = ModeSet::new(1.0).unwrap();
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|i| sample_free_field(&m, 11, i).alpha[0].norm_sqr()).collect();
        let (mean, std) = crate::stats::mean_std(&xs);
        assert!((mean - 1.0).abs() < 3.0 * std / (n as f64).sqrt(), "{mean}");
    }

    #[test]
    fn sampler_mean_and_energy() {
        let m = ModeSet::new(2.0).unwrap();
        let n = 50_000;
        let samples: Vec<FieldSample> = (0..n).map(|i| sample_free_field(&m, 3, i)).collect();
        for j in 0..m.len() {
            let re: Vec<f64> = samples.iter().map(|s| s.alpha[j].re).collect();
            let (mean, std) = crate::stats::mean_std(&re);
            assert!(mean.abs() < 3.0 * std / (n as f64).sqrt());
        }
        // ⟨u, h u⟩ with Lebesgue measure = (2π)² Σ λ_k |α_k|²
        let energy: Vec<f64> = samples
            .iter()
            .map(|s| LEBESGUE_VOLUME * s.alpha.iter().zip(m.eigenvalues()).map(|(a, l)| l * a.norm_sqr()).sum::<f64>())
            .collect();
        let (mean, std) = crate::stats::mean_std(&energy);
        let target = m.len() as f64 * LEBESGUE_VOLUME;
        assert!((mean - target).abs() < 3.0 * std / (n as f64).sqrt(), "{mean} vs {target}");
    }

    #[test]
    fn grid_roundtrip() {
        let m = ModeSet::new(10.0).unwrap();
        let f = sample_free_field(&m, 5, 0);
        let g = GridField::from_sample(&f, &m, 8).unwrap();
        let back = g.to_sample(&m);
        for (a, b) in f.alpha.iter().zip(&back.alpha) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!(matches!(GridField::from_sample(&f, &m, 4), Err(Error::Config(_))));
        assert!(GridField::from_sample(&f, &m, 12).is_err());
    }

    #[test]
    fn wick_density_examples() {
        let m = ModeSet::new(5.0).unwrap();
        let c = crate::spectral::wick_mass(&m);
        let g = wick_density(&FieldSample::zero(&m), &m, c, 8).unwrap();
        assert!(g.values.iter().all(|v| (v.re + c).abs() < 1e-15));

        let m1 = ModeSet::new(1.0).unwrap();
        let f = FieldSample { alpha: vec![Complex64::new(1.0, 0.0)] };
        let g = wick_density(&f, &m1, 1.0, 2).unwrap();
        assert!(g.values.iter().all(|v| v.re.abs() < 1e-15));

        let f = sample_free_field(&m, 9, 1);
        let g = wick_density(&f, &m, c, 8).unwrap();
        let spectral = f.mass() - c;
        assert_relative_eq!(g.mean().re, spectral, max_relative = 1e-10);
    }

    #[test]
    fn zero_field_single_mode() {
        let (m, p, rc) = setup(1.0, 0.5, LEBESGUE_VOLUME);
        let ev = Interactions::new(&m, &p, &rc, 2).unwrap();
        let vals = ev.evaluate(&FieldSample::zero(&m));
        let v2 = LEBESGUE_VOLUME * LEBESGUE_VOLUME;
        assert_relative_eq!(vals.w, 0.5 * v2 + rc.tau * LEBESGUE_VOLUME - rc.e_const, max_relative = 1e-14);
        assert_relative_eq!(vals.w, v2, max_relative = 1e-14);
        assert_relative_eq!(vals.v_local, LEBESGUE_VOLUME, max_relative = 1e-14);
        assert_relative_eq!(vals.cross, vals.v_smeared - vals.w, epsilon = 1e-9);

        let one = FieldSample { alpha: vec![Complex64::new(1.0, 0.0)] };
        let vals = ev.evaluate(&one);
        assert_relative_eq!(vals.w, -rc.e_const, max_relative = 1e-14);
        assert_relative_eq!(vals.v_local, -0.5 * LEBESGUE_VOLUME, max_relative = 1e-14);
    }

    #[test]
    fn v_local_zero_field_is_constant() {
        let m = ModeSet::new(10.0).unwrap();
        let c = crate::spectral::wick_mass(&m);
        let v = interaction_v_local(&FieldSample::zero(&m), &m, c, LEBESGUE_VOLUME, 16).unwrap();
        assert_relative_eq!(v, c * c * LEBESGUE_VOLUME, max_relative = 1e-13);
        assert!(interaction_v_local(&FieldSample::zero(&m), &m, c, 1.0, 8).is_err());
    }

    #[test]
    fn identity_and_direct_agreement() {
        for vol in [UNIT_VOLUME, LEBESGUE_VOLUME] {
            for (cutoff, eps) in [(2.0, 0.4), (5.5, 0.2), (10.0, 0.1)] {
                let (m, p, rc) = setup(cutoff, eps, vol);
                let ev = Interactions::with_default_grid(&m, &p, &rc).unwrap();
                for i in 0..20 {
                    let f = sample_free_field(&m, 21, i);
                    let a = ev.evaluate(&f);
                    let b = direct::evaluate(&f, &m, &p, &rc);
                    let scale = a.w.abs().max(a.v_smeared.abs()).max(1.0);
                    assert!((a.v_smeared - (a.w + a.cross)).abs() < 1e-8 * scale);
                    for (x, y) in [(a.w, b.w), (a.v_local, b.v_local), (a.v_smeared, b.v_smeared), (a.cross, b.cross)] {
                        assert!((x - y).abs() <= 1e-8 * x.abs().max(y.abs()).max(1.0), "{x} vs {y}");
                    }
                    assert!(a.quadratic >= 0.0);
                    assert!(a.w >= ev.young_bound() - 1e-9 * scale);
                }
            }
        }
    }

    #[test]
    fn zero_field_identity() {
        let (m, p, rc) = setup(10.0, 0.2, LEBESGUE_VOLUME);
        let ev = Interactions::with_default_grid(&m, &p, &rc).unwrap();
        let v = ev.evaluate(&FieldSample::zero(&m));
        let w = interaction_w(&FieldSample::zero(&m), &m, &p, &rc, ev.n_grid()).unwrap();
        let vs = interaction_v_smeared(&FieldSample::zero(&m), &m, &p, &rc, ev.n_grid()).unwrap();
        let i = cross_term_i(&FieldSample::zero(&m), &m, &p, &rc, ev.n_grid()).unwrap();
        assert_eq!(v.w, w);
        assert!((vs - w - i).abs() < 1e-8 * vs.abs().max(1.0));
    }

    #[test]
    fn mismatched_constants_rejected() {
        let (m, p, rc) = setup(5.0, 0.2, UNIT_VOLUME);
        let other = ModeSet::new(10.0).unwrap();
        assert!(Interactions::new(&other, &p, &rc, 32).is_err());
        assert!(Interactions::new(&m, &p.with_epsilon(0.3), &rc, 16).is_err());
        assert!(Interactions::new(&m, &p, &rc, 8).is_err());
    }

    #[test]
    fn closed_form_cross_norm_vanishes_for_flat_potential() {
        // As ε → 0 every ĝ_r tends to ĝ_0 = c_K.
        let m = ModeSet::new(10.0).unwrap();
        let p = PotentialSpec::gaussian(1e-6);
        let rc = renorm_constants(&m, &p, 0.5, UNIT_VOLUME).unwrap();
        let ev = Interactions::with_default_grid(&m, &p, &rc).unwrap();
        assert!(cross_term_l2_norm(&ev) < 1e-8);
    }
}
