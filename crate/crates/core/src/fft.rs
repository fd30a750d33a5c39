//! Square two-dimensional FFTs on row-major buffers.

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::sync::Arc;

/// Planned 2D transform of size `n × n`.
///
/// Both directions are unnormalized: `forward` computes `Σ_x f(x) e^{-2πi k·x/n}`
/// and `inverse` computes `Σ_k F(k) e^{+2πi k·x/n}`.
pub struct Fft2 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft(n, FftDirection::Forward),
            inverse: planner.plan_fft(n, FftDirection::Inverse),
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.apply(&self.forward, data);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.apply(&self.inverse, data);
    }

    fn apply(&self, fft: &Arc<dyn Fft<f64>>, data: &mut [Complex64]) {
        let n = self.n;
        assert_eq!(data.len(), n * n, "buffer is not n×n");
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        // rows are contiguous
        fft.process_with_scratch(data, &mut scratch);
        transpose_in_place(data, n);
        fft.process_with_scratch(data, &mut scratch);
        transpose_in_place(data, n);
    }
}

fn transpose_in_place(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

/// Grid slot of a signed frequency (or a signed lattice offset) on an `n`-periodic axis.
#[inline]
pub fn wrap(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

/// Signed frequency stored at slot `i` of an `n`-periodic axis, in `[-n/2, n/2)`.
#[inline]
pub fn unwrap(i: usize, n: usize) -> i64 {
    let i = i as i64;
    let n = n as i64;
    if i >= (n + 1) / 2 {
        i - n
    } else {
        i
    }
}

/// Smallest 7-smooth integer `≥ m`; these sizes are fast for mixed-radix FFTs.
pub fn next_smooth(m: usize) -> usize {
    let mut n = m.max(1);
    loop {
        let mut r = n;
        for p in [2, 3, 5, 7] {
            while r.is_multiple_of(p) {
                r /= p;
            }
        }
        if r == 1 {
            return n;
        }
        n += 1;
    }
}
