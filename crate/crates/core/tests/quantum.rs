use gibbs_core::fock::{
    build_renormalized_hamiltonian, density_mode, free_energy_functional, free_log_partition, gibbs_state,
    number_operator, p_localize, random_state, reduced_density, scaled_free_hamiltonian, scaled_hamiltonian_with,
    variance_observable, DensityOperator, FockBasis, HamiltonianTerms,
};
use gibbs_core::spectral::{renorm_constants, ModeSet, PotentialSpec, UNIT_VOLUME};
use gibbs_core::stats::sample_stream;
use gibbs_core::Complex64;
use nalgebra::DMatrix;
use rand::Rng;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn free_state(m: &ModeSet, n_max: usize, lambda: f64) -> (FockBasis, DensityOperator) {
    let b = FockBasis::new(m, n_max).unwrap();
    let g = gibbs_state(&scaled_free_hamiltonian(&b, lambda)).unwrap();
    (b, g.state)
}

fn occupations(m: &ModeSet, lambda: f64) -> Vec<f64> {
    m.eigenvalues().iter().map(|&l| 1.0 / (lambda * l).exp_m1()).collect()
}

#[test]
fn free_reduced_density_is_bose_einstein() {
    let m = ModeSet::from_modes(vec![[0, 0], [1, 0]]).unwrap();
    let (b, g) = free_state(&m, 40, 1.0);
    let g1 = reduced_density(&g, &b, 1).unwrap();
    let occ = occupations(&m, 1.0);
    for i in 0..2 {
        for j in 0..2 {
            let want = if i == j { occ[i] } else { 0.0 };
            assert!((g1[(i, j)] - Complex64::new(want, 0.0)).norm() < 1e-12, "{i}{j}: {}", g1[(i, j)]);
        }
    }
    let n = g.expect(&number_operator(&b)).re;
    assert!((g1.trace().re - n).abs() < 1e-12);
}

#[test]
fn number_variance_of_free_state() {
    let m = ModeSet::from_modes(vec![[0, 0], [1, 0]]).unwrap();
    let lambda = 1.0;
    let (b, g) = free_state(&m, 40, lambda);
    let number = number_operator(&b);
    let mean = g.expect(&number);
    let var = variance_observable(&g, &number, mean);
    let want: f64 = m
        .eigenvalues()
        .iter()
        .map(|&l| {
            let x = (lambda * l).exp();
            x / (x - 1.0).powi(2)
        })
        .sum();
    assert!((var - want).abs() < 1e-10 * want, "{var} vs {want}");
    for shift in [-0.3, 0.2] {
        assert!(variance_observable(&g, &number, mean + shift) > var);
    }
}

/// One-body matrix of `e_k^-`: `φ_n ↦ φ_{n+k}` within the modes.
fn shift_matrix(m: &ModeSet, k: [i64; 2]) -> DMatrix<Complex64> {
    let mut e = DMatrix::from_element(m.len(), m.len(), ZERO);
    for (j, n) in m.modes().iter().enumerate() {
        if let Some(i) = m.index_of([n[0] + k[0], n[1] + k[1]]) {
            e[(i, j)] = Complex64::new(1.0, 0.0);
        }
    }
    e
}

#[test]
fn density_mode_statistics_factorize_on_free_state() {
    let m = ModeSet::from_modes(vec![[-1, 0], [0, 0], [1, 0]]).unwrap();
    let lambda = 1.5;
    let (b, g) = free_state(&m, 22, lambda);
    assert!(g.top_shell_mass(&b) < 1e-8);
    let gamma1 = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        3,
        occupations(&m, lambda).into_iter().map(|x| Complex64::new(x, 0.0)),
    ));
    for k in [[1, 0], [2, 0], [-1, 0]] {
        let d = density_mode(&b, k);
        let mean = g.expect(&d);
        assert!(mean.norm() < 1e-14);
        let e = shift_matrix(&m, k);
        let second = variance_observable(&g, &d, ZERO);
        let wick = mean.norm_sqr()
            + (e.adjoint() * &e * &gamma1).trace().re
            + (e.adjoint() * &gamma1 * &e * &gamma1).trace().re;
        assert!((second - wick).abs() < 1e-8, "k = {k:?}: {second} vs {wick}");
    }
}

#[test]
fn localization_of_free_state_is_free_state() {
    let big = ModeSet::from_modes(vec![[0, 0], [1, 0]]).unwrap();
    let sub = ModeSet::from_modes(vec![[1, 0]]).unwrap();
    let (b, g) = free_state(&big, 40, 1.0);
    let (g_p, small) = p_localize(&g, &b, &sub).unwrap();
    let (_, want) = free_state(&sub, 40, 1.0);
    assert_eq!(small.dim(), 41);
    assert!((g_p.matrix() - want.matrix()).norm() < 1e-12);

    let (same, _) = p_localize(&g, &b, &big).unwrap();
    assert!((same.matrix() - g.matrix()).norm() < 1e-15);
}

#[test]
fn localization_is_dual_to_tensoring_with_identity() {
    let big = ModeSet::from_modes(vec![[0, 0], [0, 1], [1, 0]]).unwrap();
    let sub = ModeSet::from_modes(vec![[0, 1]]).unwrap();
    let b = FockBasis::new(&big, 4).unwrap();
    let mut rng = sample_stream(99, 0);
    let gamma = random_state(b.dim(), 4, &mut rng);
    let (g_p, small) = p_localize(&gamma, &b, &sub).unwrap();
    let j = big.index_of([0, 1]).unwrap();

    let g1 = reduced_density(&gamma, &b, 1).unwrap();
    let g1_p = reduced_density(&g_p, &small, 1).unwrap();
    assert!((g1_p[(0, 0)] - g1[(j, j)]).norm() < 1e-12);

    for _ in 0..10 {
        let a = DMatrix::from_fn(small.dim(), small.dim(), |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        // A ⊗ 1 acts on the sub-mode occupation and leaves the others fixed.
        let mut lifted = DMatrix::from_element(b.dim(), b.dim(), ZERO);
        for r in 0..b.dim() {
            for c in 0..b.dim() {
                let (sr, sc) = (b.state(r), b.state(c));
                let rest_equal = (0..big.len()).filter(|&i| i != j).all(|i| sr[i] == sc[i]);
                if rest_equal {
                    let pr = small.index_of(&[sr[j]]).unwrap();
                    let pc = small.index_of(&[sc[j]]).unwrap();
                    lifted[(r, c)] = a[(pr, pc)];
                }
            }
        }
        let lhs = (lifted * gamma.matrix()).trace();
        let rhs = (&a * g_p.matrix()).trace();
        assert!((lhs - rhs).norm() < 1e-12);
    }
}

#[test]
fn interacting_gibbs_state_commutes_and_minimizes() {
    let m = ModeSet::new(2.0).unwrap();
    let lambda = 0.5;
    let p = PotentialSpec::gaussian(0.5);
    let rc = renorm_constants(&m, &p, lambda, UNIT_VOLUME).unwrap();
    let b = FockBasis::new(&m, 5).unwrap();
    let h = build_renormalized_hamiltonian(&b, &p, &rc, lambda).unwrap();
    let g = gibbs_state(&h).unwrap();
    g.state.validate().unwrap();
    let hd = h.to_dense();
    let comm = &hd * g.state.matrix() - g.state.matrix() * &hd;
    assert!(comm.iter().all(|z| z.norm() < 1e-10));

    // ⟨D_k⟩ vanishes on the free state for k ≠ 0.
    let free = gibbs_state(&scaled_free_hamiltonian(&b, lambda)).unwrap().state;
    for k in m.differences().into_iter().filter(|&k| k != [0, 0]) {
        assert!(free.expect(&density_mode(&b, k)).norm() < 1e-14);
    }

    let f_min = g.free_energy();
    let mut rng = sample_stream(4, 0);
    for i in 0..20 {
        let other = random_state(b.dim(), 1 + i % 5, &mut rng);
        let trial = g.state.mix(&other, 0.05 * (i + 1) as f64).unwrap();
        assert!(free_energy_functional(&h, &trial) >= f_min - 1e-9);
    }
}

#[test]
fn switching_off_the_interaction_gives_the_free_partition_function() {
    let m = ModeSet::new(2.0).unwrap();
    let lambda = 2.0;
    let b = FockBasis::new(&m, 12).unwrap();
    let terms = HamiltonianTerms { lambda, volume: 1.0, tau: 0.0, e_const: 0.0, n0: 0.3 };
    let h = scaled_hamiltonian_with(&b, |_| 0.0, &terms);
    let g = gibbs_state(&h).unwrap();
    assert!((g.log_partition - free_log_partition(&m, lambda)).abs() < 1e-9);
    let free = gibbs_state(&scaled_free_hamiltonian(&b, lambda)).unwrap();
    assert!((g.log_partition - free.log_partition).abs() < 1e-14);
}
