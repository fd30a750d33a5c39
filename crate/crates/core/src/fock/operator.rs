//! Sparse operators on a truncated Fock space: ladder operators, second
//! quantization, and the algebra needed to assemble Hamiltonians.

use super::basis::FockBasis;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::collections::BTreeMap;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Row-major sparse matrix; each row is sorted by column with no explicit zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    dim: usize,
    rows: Vec<Vec<(usize, Complex64)>>,
    hermitian: bool,
}

impl FockOperator {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, rows: vec![Vec::new(); dim], hermitian: true }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim])
    }

    pub fn diagonal(d: &[f64]) -> Self {
        Self {
            dim: d.len(),
            rows: d
                .iter()
                .enumerate()
                .map(|(i, &v)| if v != 0.0 { vec![(i, Complex64::new(v, 0.0))] } else { Vec::new() })
                .collect(),
            hermitian: true,
        }
    }

    /// Build from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, Complex64)>) -> Self {
        let mut acc: Vec<BTreeMap<usize, Complex64>> = vec![BTreeMap::new(); dim];
        for (i, j, v) in triplets {
            *acc[i].entry(j).or_insert(ZERO) += v;
        }
        let mut op = Self {
            dim,
            rows: acc.into_iter().map(|r| r.into_iter().filter(|(_, v)| *v != ZERO).collect()).collect(),
            hermitian: false,
        };
        op.hermitian = op.hermiticity_defect() < 1e-12;
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row(&self, i: usize) -> &[(usize, Complex64)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        match self.rows[i].binary_search_by_key(&j, |e| e.0) {
            Ok(p) => self.rows[i][p].1,
            Err(_) => ZERO,
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.rows.iter().enumerate().flat_map(|(i, r)| r.iter().map(move |&(j, v)| (i, j, v)))
    }

    pub fn adjoint(&self) -> Self {
        let mut op = Self::from_triplets(self.dim, self.triplets().map(|(i, j, v)| (j, i, v.conj())));
        op.hermitian = self.hermitian;
        op
    }

    /// `max |A - A†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.triplets().map(|(i, j, v)| (v - self.get(j, i).conj()).norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_triplets(self.dim, self.triplets().map(|(i, j, v)| (i, j, v * s)))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self::from_triplets(self.dim, self.triplets().chain(other.triplets()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// `A - s·1`.
    pub fn shift(&self, s: Complex64) -> Self {
        Self::from_triplets(self.dim, self.triplets().chain((0..self.dim).map(|i| (i, i, -s))))
    }

    /// Sparse product `self · other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut triplets = Vec::new();
        let mut acc = vec![ZERO; self.dim];
        let mut touched = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            for &(k, a) in row {
                for &(j, b) in &other.rows[k] {
                    if acc[j] == ZERO {
                        touched.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            for &j in &touched {
                triplets.push((i, j, acc[j]));
                acc[j] = ZERO;
            }
            touched.clear();
        }
        Self::from_triplets(self.dim, triplets)
    }

    pub fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        DVector::from_iterator(self.dim, self.rows.iter().map(|r| r.iter().map(|&(j, a)| a * v[j]).sum()))
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(self.dim, self.dim, ZERO);
        for (i, j, v) in self.triplets() {
            m[(i, j)] = v;
        }
        m
    }

    /// `Tr[A M]` for a dense `M`.
    pub fn trace_with(&self, m: &DMatrix<Complex64>) -> Complex64 {
        self.triplets().map(|(i, j, v)| v * m[(j, i)]).sum()
    }

    /// `max |A_{ij}|`.
    pub fn max_abs(&self) -> f64 {
        self.triplets().map(|t| t.2.norm()).fold(0.0, f64::max)
    }

    /// Mark as Hermitian after checking, or fail.
    pub fn require_hermitian(&self) -> Result<()> {
        let d = self.hermiticity_defect();
        if d < 1e-12 * self.max_abs().max(1.0) {
            Ok(())
        } else {
            Err(Error::NotHermitian(d))
        }
    }
}

/// `a†_j`; states that would leave the truncated space are dropped.
pub fn creation(basis: &FockBasis, j: usize) -> FockOperator {
    assert!(j < basis.n_modes(), "mode index out of range");
    let mut triplets = Vec::new();
    let mut n = Vec::new();
    for i in 0..basis.dim() {
        if basis.total(i) == basis.n_max() {
            continue;
        }
        n.clone_from(basis.state(i));
        let amp = ((n[j] as f64) + 1.0).sqrt();
        n[j] += 1;
        let target = basis.index_of(&n).expect("interior state has a successor");
        triplets.push((target, i, Complex64::new(amp, 0.0)));
    }
    FockOperator::from_triplets(basis.dim(), triplets)
}

/// `(a_j, a†_j)`.
pub fn build_ladder(basis: &FockBasis, j: usize) -> (FockOperator, FockOperator) {
    let up = creation(basis, j);
    (up.adjoint(), up)
}

/// `dΓ(A) = Σ_{m,n} A_{mn} a†_m a_n`, built directly; it conserves the total number.
pub fn dgamma(one_body: &DMatrix<Complex64>, basis: &FockBasis) -> FockOperator {
    let k = basis.n_modes();
    assert_eq!(one_body.shape(), (k, k), "one-body matrix must be K×K");
    let mut triplets = Vec::new();
    let mut n = Vec::new();
    for i in 0..basis.dim() {
        let s = basis.state(i);
        for q in 0..k {
            if s[q] == 0 {
                continue;
            }
            for p in 0..k {
                let a = one_body[(p, q)];
                if a == ZERO {
                    continue;
                }
                n.clone_from(s);
                let removed = n[q] as f64;
                n[q] -= 1;
                // one square root keeps diagonal entries exact integers
                let amp = (removed * (n[p] as f64 + 1.0)).sqrt();
                n[p] += 1;
                let target = basis.index_of(&n).expect("number-conserving move stays in the basis");
                triplets.push((target, i, a * amp));
            }
        }
    }
    let mut op = FockOperator::from_triplets(basis.dim(), triplets);
    let herm = (0..k).all(|p| (0..k).all(|q| (one_body[(p, q)] - one_body[(q, p)].conj()).norm() < 1e-14));
    op.hermitian = herm;
    op
}

/// Number operator `𝒩`.
pub fn number_operator(basis: &FockBasis) -> FockOperator {
    FockOperator::diagonal(&(0..basis.dim()).map(|i| basis.total(i) as f64).collect::<Vec<_>>())
}

/// `dΓ(e_k^-) = Σ_{n, n+k ∈ modes} a†_{n+k} a_n`: second quantization of the
/// multiplication by `e^{ik·x}` compressed to the mode set.
pub fn density_mode(basis: &FockBasis, k: [i64; 2]) -> FockOperator {
    let modes = basis.modes();
    let mut a = DMatrix::from_element(modes.len(), modes.len(), ZERO);
    for (q, n) in modes.modes().iter().enumerate() {
        if let Some(p) = modes.index_of([n[0] + k[0], n[1] + k[1]]) {
            a[(p, q)] = Complex64::new(1.0, 0.0);
        }
    }
    dgamma(&a, basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::ModeSet;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn number_operator_single_mode() {
        let b = FockBasis::new(&ModeSet::new(1.0).unwrap(), 2).unwrap();
        let (a, ad) = build_ladder(&b, 0);
        let n = ad.mul(&a);
        assert!(n.sub(&FockOperator::diagonal(&[0.0, 1.0, 2.0])).max_abs() < 1e-15);
        assert_eq!(number_operator(&b), FockOperator::diagonal(&[0.0, 1.0, 2.0]));
    }

    #[test]
    fn ccr_on_interior() {
        let m = ModeSet::new(2.0).unwrap();
        let b = FockBasis::new(&m, 4).unwrap();
        let ladders: Vec<_> = (0..m.len()).map(|j| build_ladder(&b, j)).collect();
        for (j, (aj, adj)) in ladders.iter().enumerate() {
            let comm = aj.mul(adj).sub(&adj.mul(aj));
            for (r, col, v) in comm.triplets() {
                let expect = if r == col { c(1.0) } else { c(0.0) };
                if b.total(r) < b.n_max() {
                    assert!((v - expect).norm() < 1e-14);
                } else {
                    assert!(b.total(col) == b.n_max());
                }
            }
            for (l, (al, _)) in ladders.iter().enumerate() {
                if l != j {
                    assert_eq!(aj.mul(al).sub(&al.mul(aj)).nnz(), 0);
                }
            }
        }
    }

    #[test]
    fn dgamma_examples() {
        let m = ModeSet::new(2.0).unwrap();
        let b = FockBasis::new(&m, 3).unwrap();
        let id = DMatrix::identity(m.len(), m.len());
        assert_eq!(dgamma(&id, &b), number_operator(&b));
        let h = DMatrix::from_diagonal(&DVector::from_iterator(m.len(), m.eigenvalues().iter().map(|&l| c(l))));
        let d = dgamma(&h, &b);
        for i in 0..b.dim() {
            let e: f64 = b.state(i).iter().zip(m.eigenvalues()).map(|(&n, l)| n as f64 * l).sum();
            assert!((d.get(i, i).re - e).abs() < 1e-14);
            assert_eq!(d.row(i).len(), usize::from(e != 0.0));
        }
        // dΓ agrees with the product of ladder operators.
        let a = DMatrix::from_fn(m.len(), m.len(), |p, q| Complex64::new((p * 3 + q) as f64, p as f64 - q as f64));
        let mut sum = FockOperator::zeros(b.dim());
        for p in 0..m.len() {
            for q in 0..m.len() {
                let (aq, _) = build_ladder(&b, q);
                let (_, adp) = build_ladder(&b, p);
                sum = sum.add(&adp.mul(&aq).scale(a[(p, q)]));
            }
        }
        let diff = dgamma(&a, &b).sub(&sum);
        assert!(diff.max_abs() < 1e-12);
    }

    #[test]
    fn density_mode_adjoint_symmetry() {
        let m = ModeSet::new(5.0).unwrap();
        let b = FockBasis::new(&m, 3).unwrap();
        for k in m.differences() {
            let d = density_mode(&b, k);
            let dm = density_mode(&b, [-k[0], -k[1]]);
            assert_eq!(d.adjoint(), dm);
        }
        assert_eq!(density_mode(&b, [0, 0]), number_operator(&b));
    }
}
