//! Occupation-number basis of the bosonic Fock space over a finite mode set,
//! truncated at total particle number `n_max`.

use crate::error::{Error, Result};
use crate::spectral::ModeSet;
use std::collections::HashMap;

/// Largest Fock dimension handled by the dense eigensolvers.
pub const MAX_DIMENSION: usize = 8000;

pub type Occupation = Vec<u16>;

/// States with `Σ nⱼ ≤ n_max`, ordered by total number and then lexicographically.
#[derive(Debug, Clone)]
pub struct FockBasis {
    modes: ModeSet,
    n_max: usize,
    states: Vec<Occupation>,
    totals: Vec<usize>,
    index: HashMap<Occupation, usize>,
}

/// `C(n + k, k)` without overflow for the sizes of interest; saturates at `usize::MAX`.
pub fn fock_dimension(k: usize, n_max: usize) -> usize {
    let mut d: u128 = 1;
    for i in 1..=k as u128 {
        d = d * (n_max as u128 + i) / i;
        if d > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    d as usize
}

fn push_shell(k: usize, total: usize, prefix: &mut Occupation, out: &mut Vec<Occupation>) {
    if prefix.len() + 1 == k {
        prefix.push(total as u16);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in 0..=total {
        prefix.push(first as u16);
        push_shell(k, total - first, prefix, out);
        prefix.pop();
    }
}

impl FockBasis {
    pub fn new(modes: &ModeSet, n_max: usize) -> Result<Self> {
        Self::with_cap(modes, n_max, MAX_DIMENSION)
    }

    pub fn with_cap(modes: &ModeSet, n_max: usize, cap: usize) -> Result<Self> {
        let k = modes.len();
        let dim = fock_dimension(k, n_max);
        if dim > cap {
            return Err(Error::Config(format!(
                "Fock dimension C({n_max}+{k}, {k}) = {dim} exceeds the cap {cap}; reduce the cutoff or n_max"
            )));
        }
        if n_max > u16::MAX as usize {
            return Err(Error::Config(format!("n_max = {n_max} is too large")));
        }
        let mut states = Vec::with_capacity(dim);
        let mut totals = Vec::with_capacity(dim);
        for total in 0..=n_max {
            let before = states.len();
            push_shell(k, total, &mut Vec::with_capacity(k), &mut states);
            totals.extend(std::iter::repeat_n(total, states.len() - before));
        }
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Ok(Self { modes: modes.clone(), n_max, states, totals, index })
    }

    pub fn modes(&self) -> &ModeSet {
        &self.modes
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[Occupation] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &Occupation {
        &self.states[i]
    }

    /// Total particle number of state `i`.
    pub fn total(&self, i: usize) -> usize {
        self.totals[i]
    }

    pub fn index_of(&self, n: &[u16]) -> Option<usize> {
        self.index.get(n).copied()
    }

    /// Indices of the states with `Σ nⱼ = n_max`.
    pub fn top_shell(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.dim()).filter(move |&i| self.totals[i] == self.n_max)
    }

    /// Total momentum `Σ nⱼ kⱼ` of state `i`.
    pub fn momentum(&self, i: usize) -> [i64; 2] {
        let mut p = [0i64; 2];
        for (n, k) in self.states[i].iter().zip(self.modes.modes()) {
            p[0] += *n as i64 * k[0];
            p[1] += *n as i64 * k[1];
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions_and_order() {
        let m1 = ModeSet::new(1.0).unwrap();
        let b = FockBasis::new(&m1, 4).unwrap();
        assert_eq!(b.dim(), 5);
        assert_eq!(b.state(3), &vec![3u16]);
        let m5 = ModeSet::new(2.0).unwrap();
        for n_max in 0..6 {
            let b = FockBasis::new(&m5, n_max).unwrap();
            assert_eq!(b.dim(), fock_dimension(5, n_max));
            for w in b.states().windows(2) {
                let (ta, tb) = (w[0].iter().sum::<u16>(), w[1].iter().sum::<u16>());
                assert!(ta < tb || (ta == tb && w[0] < w[1]));
            }
            for (i, s) in b.states().iter().enumerate() {
                assert_eq!(b.index_of(s), Some(i));
            }
        }
        assert_eq!(fock_dimension(3, 20), 1771);
    }

    #[test]
    fn cap_is_enforced() {
        let m = ModeSet::new(10.0).unwrap();
        assert!(matches!(FockBasis::new(&m, 10), Err(Error::Config(_))));
    }
}
