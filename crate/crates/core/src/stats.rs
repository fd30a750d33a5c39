//! Reproducible accumulation and random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Kahan–Babuška compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Merge another accumulator into this one.
    pub fn merge(&mut self, other: &KahanSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of a slice.
pub fn kahan_sum(xs: &[f64]) -> f64 {
    xs.iter().copied().collect::<KahanSum>().value()
}

/// `log Σ exp(x_i)`, stable for large magnitudes. Returns `-∞` for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let s: KahanSum = xs.iter().map(|&x| (x - max).exp()).collect();
    max + s.value().ln()
}

/// Sample mean and unbiased sample standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = kahan_sum(xs) / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let ss: KahanSum = xs.iter().map(|&x| (x - mean) * (x - mean)).collect();
    (mean, (ss.value() / (n - 1.0)).sqrt())
}

/// Counter-based random stream for sample `index` under `seed`.
///
/// Every sample owns its own ChaCha stream, so results do not depend on how
/// samples are distributed across threads.
pub fn sample_stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
