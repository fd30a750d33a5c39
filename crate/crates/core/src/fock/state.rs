//! Density operators, Gibbs states, reduced density matrices, relative entropy
//! and P-localization.

use super::basis::{FockBasis, Occupation};
use super::operator::{build_ladder, FockOperator};
use crate::error::{Error, Result};
use crate::spectral::ModeSet;
use crate::stats::{log_sum_exp, KahanSum};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::collections::HashMap;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Trace tolerance of a density operator.
pub const TRACE_TOLERANCE: f64 = 1e-10;
/// Most negative eigenvalue tolerated in a density operator.
pub const POSITIVITY_TOLERANCE: f64 = 1e-12;

/// Dense density operator on a truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: DMatrix<Complex64>,
}

fn hermitian_part(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

impl DensityOperator {
    /// Accepts a Hermitian, unit-trace matrix; positivity is checked by [`Self::validate`].
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Domain("density matrix must be square".into()));
        }
        let defect = max_abs_diff(&matrix, &matrix.adjoint());
        if defect > 1e-10 {
            return Err(Error::NotHermitian(defect));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOLERANCE || tr.im.abs() > TRACE_TOLERANCE {
            return Err(Error::Domain(format!("density matrix has trace {tr}")));
        }
        Ok(Self { matrix: hermitian_part(&matrix) })
    }

    /// Normalize a positive semidefinite matrix to unit trace.
    pub fn from_unnormalized(matrix: DMatrix<Complex64>) -> Result<Self> {
        let tr = matrix.trace().re;
        if !(tr > 0.0 && tr.is_finite()) {
            return Err(Error::Domain(format!("cannot normalize a matrix with trace {tr}")));
        }
        Self::new(matrix / Complex64::new(tr, 0.0))
    }

    pub fn pure(v: &DVector<Complex64>) -> Result<Self> {
        Self::from_unnormalized(v * v.adjoint())
    }

    pub fn from_diagonal(p: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_iterator(p.len(), p.iter().map(|&x| Complex64::new(x, 0.0)))))
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `Tr[A Γ]`.
    pub fn expect(&self, a: &FockOperator) -> Complex64 {
        a.trace_with(&self.matrix)
    }

    /// Ascending eigenvalues and matching eigenvectors (columns).
    pub fn eigen(&self) -> (DVector<f64>, DMatrix<Complex64>) {
        let e = SymmetricEigen::new(self.matrix.clone());
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
        let vals = DVector::from_iterator(self.dim(), order.iter().map(|&i| e.eigenvalues[i]));
        let vecs =
            DMatrix::from_columns(&order.iter().map(|&i| e.eigenvectors.column(i).into_owned()).collect::<Vec<_>>());
        (vals, vecs)
    }

    /// Check Hermiticity, unit trace and positivity.
    pub fn validate(&self) -> Result<()> {
        Self::new(self.matrix.clone())?;
        let (vals, _) = self.eigen();
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -POSITIVITY_TOLERANCE {
            return Err(Error::Domain(format!("density matrix has eigenvalue {min}")));
        }
        Ok(())
    }

    /// `Tr[Γ log Γ]` (minus the von Neumann entropy).
    pub fn neg_entropy(&self) -> f64 {
        let (vals, _) = self.eigen();
        vals.iter().filter(|&&p| p > 0.0).map(|&p| p * p.ln()).collect::<KahanSum>().value()
    }

    /// Probability of `Σ nⱼ = n_max`, the truncation diagnostic.
    pub fn top_shell_mass(&self, basis: &FockBasis) -> f64 {
        basis.top_shell().map(|i| self.matrix[(i, i)].re).sum()
    }

    /// `(1 - t) Γ + t Γ'`.
    pub fn mix(&self, other: &Self, t: f64) -> Result<Self> {
        Self::new(&self.matrix * Complex64::new(1.0 - t, 0.0) + &other.matrix * Complex64::new(t, 0.0))
    }
}

/// Eigendecomposition of a sparse Hermitian operator block by block, the blocks
/// being the connected components of its sparsity graph.
#[derive(Debug, Clone)]
pub struct BlockEigen {
    pub dim: usize,
    pub blocks: Vec<EigenBlock>,
}

#[derive(Debug, Clone)]
pub struct EigenBlock {
    pub indices: Vec<usize>,
    pub values: DVector<f64>,
    pub vectors: DMatrix<Complex64>,
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

impl BlockEigen {
    pub fn new(h: &FockOperator) -> Result<Self> {
        h.require_hermitian()?;
        let n = h.dim();
        let mut parent: Vec<usize> = (0..n).collect();
        for (i, j, _) in h.triplets() {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
        for i in 0..n {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(i);
        }
        let mut roots: Vec<usize> = groups.keys().copied().collect();
        roots.sort_unstable();
        let blocks = roots
            .into_iter()
            .map(|r| {
                let indices = groups.remove(&r).expect("root present");
                let pos: HashMap<usize, usize> = indices.iter().enumerate().map(|(p, &i)| (i, p)).collect();
                let d = indices.len();
                let mut m = DMatrix::from_element(d, d, ZERO);
                for (p, &i) in indices.iter().enumerate() {
                    for &(j, v) in h.row(i) {
                        m[(p, pos[&j])] = v;
                    }
                }
                let e = SymmetricEigen::new(hermitian_part(&m));
                EigenBlock { indices, values: e.eigenvalues, vectors: e.eigenvectors }
            })
            .collect();
        Ok(Self { dim: n, blocks })
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.blocks.iter().flat_map(|b| b.values.iter().copied()).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.blocks.iter().flat_map(|b| b.values.iter().copied()).fold(f64::INFINITY, f64::min)
    }

    /// Dense `f(H)`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> DMatrix<Complex64> {
        let mut out = DMatrix::from_element(self.dim, self.dim, ZERO);
        for b in &self.blocks {
            let fv = b.values.map(|x| Complex64::new(f(x), 0.0));
            let scaled = DMatrix::from_fn(b.vectors.nrows(), b.vectors.ncols(), |i, j| b.vectors[(i, j)] * fv[j]);
            let local = scaled * b.vectors.adjoint();
            for (p, &i) in b.indices.iter().enumerate() {
                for (q, &j) in b.indices.iter().enumerate() {
                    out[(i, j)] = local[(p, q)];
                }
            }
        }
        out
    }
}

/// `Γ = e^{-H} / Tr e^{-H}` and `log Tr e^{-H}` for a Hermitian `H` (with `λ` absorbed).
#[derive(Debug, Clone)]
pub struct GibbsState {
    pub state: DensityOperator,
    pub log_partition: f64,
    pub spectrum: BlockEigen,
}

pub fn gibbs_state(h: &FockOperator) -> Result<GibbsState> {
    let spectrum = BlockEigen::new(h)?;
    let e_min = spectrum.min_eigenvalue();
    let neg: Vec<f64> = spectrum.eigenvalues().iter().map(|e| -e).collect();
    let log_partition = log_sum_exp(&neg);
    let log_shifted = log_partition + e_min;
    let m = spectrum.apply(|e| (-(e - e_min) - log_shifted).exp());
    Ok(GibbsState { state: DensityOperator::new(m)?, log_partition, spectrum })
}

impl GibbsState {
    /// `Tr[H Γ] + Tr[Γ log Γ] = -log Z` evaluated through the spectrum.
    pub fn free_energy(&self) -> f64 {
        -self.log_partition
    }
}

/// `Tr[H Γ'] + Tr[Γ' log Γ']`, minimized by the Gibbs state of `H`.
pub fn free_energy_functional(h: &FockOperator, trial: &DensityOperator) -> f64 {
    trial.expect(h).re + trial.neg_entropy()
}

/// `(a_j, a†_j)` for every mode.
pub fn ladders(basis: &FockBasis) -> Vec<(FockOperator, FockOperator)> {
    (0..basis.n_modes()).map(|j| build_ladder(basis, j)).collect()
}

/// Reduced density matrices:
/// order 1: `Γ⁽¹⁾_{mq} = Tr[a†_q a_m Γ]` (`K × K`);
/// order 2: `Γ⁽²⁾_{(m,n),(p,q)} = ½ Tr[a†_p a†_q a_n a_m Γ]` (`K² × K²`, pair `(m, n) ↦ mK + n`).
pub fn reduced_density(gamma: &DensityOperator, basis: &FockBasis, order: usize) -> Result<DMatrix<Complex64>> {
    let k = basis.n_modes();
    let l = ladders(basis);
    match order {
        1 => Ok(DMatrix::from_fn(k, k, |m, q| gamma.expect(&l[q].1.mul(&l[m].0)))),
        2 => {
            let mut out = DMatrix::from_element(k * k, k * k, ZERO);
            for m in 0..k {
                for n in 0..k {
                    let ann = l[n].0.mul(&l[m].0);
                    for p in 0..k {
                        for q in 0..k {
                            let op = l[p].1.mul(&l[q].1).mul(&ann);
                            out[(m * k + n, p * k + q)] = gamma.expect(&op) * 0.5;
                        }
                    }
                }
            }
            Ok(out)
        }
        _ => Err(Error::Unsupported(format!("reduced density of order {order}"))),
    }
}

/// `𝓗(Γ, Γ') = Tr[Γ (log Γ - log Γ')]`.
pub fn relative_entropy(gamma: &DensityOperator, other: &DensityOperator) -> Result<f64> {
    if gamma.dim() != other.dim() {
        return Err(Error::Domain("states live on different spaces".into()));
    }
    let (p, v) = gamma.eigen();
    let (q, w) = other.eigen();
    let overlap = v.adjoint() * &w;
    let mut cross = KahanSum::new();
    for j in 0..q.len() {
        let weight: f64 = (0..p.len()).map(|i| p[i].max(0.0) * overlap[(i, j)].norm_sqr()).sum();
        if q[j] < 1e-14 {
            if weight > 1e-12 {
                return Err(Error::Support(weight));
            }
            continue;
        }
        cross.add(weight * q[j].ln());
    }
    Ok(gamma.neg_entropy() - cross.value())
}

/// `Tr[(A - m)†(A - m) Γ]`.
pub fn variance_observable(gamma: &DensityOperator, a: &FockOperator, reference_mean: Complex64) -> f64 {
    let b = a.shift(reference_mean);
    let d = gamma.dim();
    // Y = B Γ row by row, then Σ conj(B_{ki}) Y_{ki}.
    let g = gamma.matrix();
    let mut acc = KahanSum::new();
    for k in 0..d {
        let row = b.row(k);
        if row.is_empty() {
            continue;
        }
        for &(i, bki) in row {
            let yki: Complex64 = row.iter().map(|&(j, bkj)| bkj * g[(j, i)]).sum();
            acc.add((bki.conj() * yki).re);
        }
    }
    acc.value()
}

/// Partial trace of a state on `big` onto the Fock space of `sub ⊆ big.modes()`.
/// The sub-basis keeps the same `n_max`.
pub fn p_localize(gamma: &DensityOperator, big: &FockBasis, sub: &ModeSet) -> Result<(DensityOperator, FockBasis)> {
    if !sub.is_subset_of(big.modes()) {
        return Err(Error::Domain("sub mode set is not contained in the big one".into()));
    }
    let small = FockBasis::with_cap(sub, big.n_max(), usize::MAX)?;
    let inside: Vec<usize> = sub.modes().iter().map(|&k| big.modes().index_of(k).expect("subset")).collect();
    let outside: Vec<usize> = (0..big.n_modes()).filter(|j| !inside.contains(j)).collect();
    let mut groups: HashMap<Occupation, Vec<(usize, usize)>> = HashMap::new();
    for i in 0..big.dim() {
        let s = big.state(i);
        let p: Occupation = inside.iter().map(|&j| s[j]).collect();
        let q: Occupation = outside.iter().map(|&j| s[j]).collect();
        let pi = small.index_of(&p).expect("P part fits under n_max");
        groups.entry(q).or_default().push((i, pi));
    }
    let mut keys: Vec<&Occupation> = groups.keys().collect();
    keys.sort();
    let g = gamma.matrix();
    let mut out = DMatrix::from_element(small.dim(), small.dim(), ZERO);
    for key in keys {
        let members = &groups[key];
        for &(i, pi) in members {
            for &(j, pj) in members {
                out[(pi, pj)] += g[(i, j)];
            }
        }
    }
    Ok((DensityOperator::new(out)?, small))
}

/// Gibbs state with `n_max` raised until the top-shell probability is below `tolerance`.
pub fn adaptive_gibbs(
    modes: &ModeSet,
    n_start: usize,
    tolerance: f64,
    cap: usize,
    build: impl Fn(&FockBasis) -> Result<FockOperator>,
) -> Result<(FockBasis, GibbsState, f64)> {
    let mut n_max = n_start.max(1);
    loop {
        let basis = FockBasis::with_cap(modes, n_max, cap)?;
        let g = gibbs_state(&build(&basis)?)?;
        let top = g.state.top_shell_mass(&basis);
        if top < tolerance {
            return Ok((basis, g, top));
        }
        n_max += (n_max / 4).max(2);
    }
}

/// Random full-rank-`rank` density operator `G G† / Tr` with complex Gaussian `G`.
pub fn random_state<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> DensityOperator {
    let g = DMatrix::from_fn(dim, rank.max(1), |_, _| {
        Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    DensityOperator::from_unnormalized(&g * g.adjoint()).expect("Gaussian matrix has positive trace")
}
