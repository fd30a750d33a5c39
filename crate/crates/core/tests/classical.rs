use gibbs_core::fft::{self, Fft2};
use gibbs_core::field::{cross_term_l2_norm, sample_free_field, Functional, GridField, Interactions};
use gibbs_core::free_energy::{
    estimate_from_values, estimate_relative_partition, l2_norm, sample_functional, sample_interactions,
    validate_scaling, ParameterMode,
};
use gibbs_core::spectral::{
    counterterm_asymptotics, full_lattice_n0, green_truncated, projected_n0, renorm_constants, successive_drift,
    ModeSet, PotentialSpec, LEBESGUE_VOLUME, UNIT_VOLUME,
};
use gibbs_core::Complex64;
use std::f64::consts::PI;

/// `Σ_k c(k) e^{ik·x}` on an `n × n` grid by one inverse FFT.
fn synthesize(n: usize, coeff: impl Fn([i64; 2]) -> f64) -> Vec<f64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            buf[i * n + j] = Complex64::new(coeff([fft::unwrap(i, n), fft::unwrap(j, n)]), 0.0);
        }
    }
    Fft2::new(n).inverse(&mut buf);
    buf.iter().map(|z| z.re).collect()
}

#[test]
fn tau_matches_grid_quadrature_at_small_epsilon() {
    let m = ModeSet::new(50.0).unwrap();
    let p = PotentialSpec::gaussian(0.1);
    let rc = renorm_constants(&m, &p, 1.0, LEBESGUE_VOLUME).unwrap();
    let n = 256;
    let w = synthesize(n, |k| p.w_hat_eps(k));
    let g = synthesize(n, |k| m.index_of(k).map_or(0.0, |i| 1.0 / m.eigenvalues()[i]));
    let cell = (2.0 * PI / n as f64).powi(2);
    let tau: f64 = cell * w.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>();
    assert!((tau - rc.tau).abs() < 1e-6 * rc.tau, "{tau} vs {}", rc.tau);
}

#[test]
fn single_mode_e_matches_double_quadrature() {
    let m = ModeSet::new(1.0).unwrap();
    let p = PotentialSpec::gaussian(0.7);
    let rc = renorm_constants(&m, &p, 1.0, LEBESGUE_VOLUME).unwrap();
    assert_eq!(rc.c_k, 1.0);
    assert!((rc.tau - LEBESGUE_VOLUME).abs() < 1e-12);
    // G_K ≡ 1, so E = ½ ∫∫ w^ε(x - y) dx dy over a 64² grid in each variable.
    let n = 64;
    let w = synthesize(n, |k| p.w_hat_eps(k));
    let cell = (2.0 * PI / n as f64).powi(2);
    let mut e = 0.0;
    for a in 0..n * n {
        let (ai, aj) = (a / n, a % n);
        for b in 0..n * n {
            let (bi, bj) = (b / n, b % n);
            e += w[((ai + n - bi) % n) * n + (aj + n - bj) % n];
        }
    }
    e *= 0.5 * cell * cell;
    assert!((e - rc.e_const).abs() < 1e-9 * rc.e_const, "{e} vs {}", rc.e_const);
}

#[test]
fn tau_is_monotone_in_epsilon_and_constants_deterministic() {
    let m = ModeSet::new(30.0).unwrap();
    let mut prev = f64::INFINITY;
    for eps in [0.05, 0.1, 0.2, 0.4, 0.8, 1.0] {
        let p = PotentialSpec::gaussian(eps);
        let rc = renorm_constants(&m, &p, 0.5, LEBESGUE_VOLUME).unwrap();
        assert!(rc.tau <= prev);
        prev = rc.tau;
        let again = renorm_constants(&m, &p, 0.5, LEBESGUE_VOLUME).unwrap();
        assert_eq!(rc.tau.to_bits(), again.tau.to_bits());
        assert_eq!(rc.e_const.to_bits(), again.e_const.to_bits());
        assert_eq!(rc.n0.to_bits(), again.n0.to_bits());
    }
    assert_eq!(
        green_truncated([0.0, 0.0], &m),
        renorm_constants(&m, &PotentialSpec::gaussian(1.0), 1.0, 1.0).unwrap().c_k
    );
}

#[test]
fn counterterms_grow_logarithmically() {
    let eps: Vec<f64> = (3..=8).map(|j| 2f64.powi(-j)).collect();
    let rows = counterterm_asymptotics(&eps, &PotentialSpec::gaussian(1.0), 2.0, UNIT_VOLUME).unwrap();
    let tau: Vec<f64> = rows.iter().map(|r| r.tau_ratio).collect();
    let e: Vec<f64> = rows.iter().map(|r| r.e_ratio).collect();
    assert!(tau.iter().all(|&t| t > 0.0));
    assert!(successive_drift(&tau).iter().all(|&d| d < 0.1), "{tau:?}");
    assert!(successive_drift(&e).iter().all(|&d| d < 0.1), "{e:?}");
    // The drift itself shrinks as ε decreases.
    let d = successive_drift(&tau);
    assert!(d.last() < d.first());
}

#[test]
fn projected_n0_is_a_subsum() {
    let full = full_lattice_n0(0.5).unwrap();
    for cutoff in [1.0, 5.0, 30.0] {
        let p = projected_n0(&ModeSet::new(cutoff).unwrap(), 0.5);
        assert!(p > 0.0 && p <= full);
    }
}

#[test]
fn wick_density_is_centered_in_pairs() {
    // E[ρ(x) ρ(y)] = G_K(x - y)² at two fixed points.
    let m = ModeSet::new(5.0).unwrap();
    let c = renorm_constants(&m, &PotentialSpec::gaussian(1.0), 1.0, 1.0).unwrap().c_k;
    let (x, y) = ([0.3, 1.1], [2.0, -0.4]);
    let n = 100_000u64;
    let prods: Vec<f64> = (0..n)
        .map(|i| {
            let f = sample_free_field(&m, 21, i);
            (f.value_at(&m, x).norm_sqr() - c) * (f.value_at(&m, y).norm_sqr() - c)
        })
        .collect();
    let mean = prods.iter().sum::<f64>() / n as f64;
    let sd = (prods.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    let want = green_truncated([x[0] - y[0], x[1] - y[1]], &m).powi(2);
    assert!((mean - want).abs() < 3.0 * sd / (n as f64).sqrt(), "{mean} vs {want} (sd {sd})");
}

#[test]
fn grid_mean_of_density_matches_coefficients() {
    let m = ModeSet::new(10.0).unwrap();
    let f = sample_free_field(&m, 5, 9);
    let g = GridField::from_sample(&f, &m, 16).unwrap();
    let mean_sq = g.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / 256.0;
    let parseval: f64 = f.alpha.iter().map(|a| a.norm_sqr()).sum();
    assert!((mean_sq - parseval).abs() < 1e-10 * parseval);
}

#[test]
fn local_quartic_and_w_have_mean_zero() {
    let m = ModeSet::new(10.0).unwrap();
    let p = PotentialSpec::gaussian(0.2);
    let rc = renorm_constants(&m, &p, 1.0, LEBESGUE_VOLUME).unwrap();
    let ev = Interactions::with_default_grid(&m, &p, &rc).unwrap();
    let vals = sample_interactions(&ev, 100_000, 77);
    for which in [Functional::V, Functional::W, Functional::VSmeared, Functional::Cross] {
        let xs: Vec<f64> = vals.iter().map(|v| v.get(which)).collect();
        let l2 = l2_norm(&xs);
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        assert!(mean.abs() <= 3.0 * sd / n.sqrt(), "{which:?}: mean {mean}, sd {sd}");
        assert!(l2.value > 0.0);
    }
}

#[test]
fn cross_term_norm_is_uniform_in_cutoff() {
    let p = PotentialSpec::gaussian(0.2);
    let norms: Vec<f64> = [10.0, 20.0, 40.0, 80.0, 160.0, 320.0]
        .iter()
        .map(|&cutoff| {
            let m = ModeSet::new(cutoff).unwrap();
            let rc = renorm_constants(&m, &p, 1.0, UNIT_VOLUME).unwrap();
            cross_term_l2_norm(&Interactions::with_default_grid(&m, &p, &rc).unwrap())
        })
        .collect();
    // Increasing in K but saturating: each doubling of Λ adds less.
    assert!(norms.windows(2).all(|w| w[1] >= w[0]));
    let steps: Vec<f64> = norms.windows(2).map(|w| w[1] - w[0]).collect();
    assert!(steps.windows(2).all(|s| s[1] < s[0]), "{norms:?}");
    let last = norms.len() - 1;
    assert!(norms[last] - norms[last - 1] < 0.05 * norms[last], "{norms:?}");
}

#[test]
fn monte_carlo_cross_norm_matches_closed_form() {
    let m = ModeSet::new(30.0).unwrap();
    let p = PotentialSpec::gaussian(0.2);
    let rc = renorm_constants(&m, &p, 1.0, UNIT_VOLUME).unwrap();
    let ev = Interactions::with_default_grid(&m, &p, &rc).unwrap();
    let est = l2_norm(&sample_functional(&ev, Functional::Cross, 20_000, 3));
    let exact = cross_term_l2_norm(&ev);
    assert!((est.value - exact).abs() < 3.0 * est.std_error, "{} ± {} vs {exact}", est.value, est.std_error);
}

#[test]
fn standard_error_follows_clt_scaling() {
    let m = ModeSet::new(5.0).unwrap();
    let p = PotentialSpec::gaussian(0.5);
    let rc = renorm_constants(&m, &p, 0.5, UNIT_VOLUME).unwrap();
    let a = estimate_relative_partition(Functional::W, &m, &p, &rc, 20_000, 1).unwrap();
    let b = estimate_relative_partition(Functional::W, &m, &p, &rc, 40_000, 1).unwrap();
    let ratio = b.std_error / a.std_error;
    let ideal = std::f64::consts::FRAC_1_SQRT_2;
    assert!(ratio >= 0.8 * ideal && ratio <= 1.2 * ideal, "ratio {ratio}");
    // Jensen and the Gibbs variational inequality with the free measure as trial.
    assert!(a.value <= a.mean_functional + 3.0 * a.mean_functional_std_error.hypot(a.std_error));
}

#[test]
fn zero_interaction_and_cross_rejection() {
    let z = estimate_from_values(&vec![0.0; 500]).unwrap();
    assert_eq!((z.value, z.std_error), (0.0, 0.0));
    let m = ModeSet::new(2.0).unwrap();
    let p = PotentialSpec::gaussian(0.5);
    let rc = renorm_constants(&m, &p, 0.5, UNIT_VOLUME).unwrap();
    assert!(estimate_relative_partition(Functional::Cross, &m, &p, &rc, 200, 0).is_err());
    assert!(estimate_relative_partition(Functional::W, &m, &p, &rc, 50, 0).is_err());
}

#[test]
fn scaling_conditions_are_enforced() {
    let err = validate_scaling(0.05, 0.45, ParameterMode::Theorem).unwrap_err();
    assert!(err.to_string().contains("1/24"));
    let err = validate_scaling(0.04, 0.2, ParameterMode::Theorem).unwrap_err();
    assert!(err.to_string().contains("8η < ν < 1/3"));
    assert!(validate_scaling(0.04, 0.33, ParameterMode::Theorem).unwrap().is_empty());
    assert_eq!(validate_scaling(0.05, 0.2, ParameterMode::Exploratory).unwrap().len(), 2);
}
