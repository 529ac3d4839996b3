//! Small statistics helpers shared by the simulators and the verification
//! drivers.
//!
//! Per-trial transfer times are integers, so accumulation uses exact
//! integer sums: aggregation is associative and order-independent, which
//! is what makes parallel and serial runs bit-identical.

use alloc::vec::Vec;

/// z quantile for a two-sided 95% normal interval.
pub const Z_95: f64 = 1.959_963_984_540_054;
/// z quantile for a two-sided 99% normal interval.
pub const Z_99: f64 = 2.575_829_303_548_901;
/// Smirnov coefficient for the 1% two-sample critical value.
pub const KS_C_01: f64 = 1.628;

/// Exact integer accumulator for a stream of integer observations.
#[derive(Debug, Clone, Copy, Default)]
pub struct Accumulator {
    pub count: u64,
    pub sum: u128,
    pub sum_sq: u128,
}

impl Accumulator {
    pub fn push(&mut self, value: u64) {
        self.count += 1;
        self.sum += u128::from(value);
        self.sum_sq += u128::from(value) * u128::from(value);
    }

    /// Combine two accumulators (order-independent).
    pub fn merge(&mut self, other: &Accumulator) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        self.sum as f64 / self.count as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        let sum = self.sum as f64;
        (self.sum_sq as f64 - sum * sum / n) / (n - 1.0)
    }

    /// Normal-approximation half-width of the mean at quantile `z`.
    pub fn half_width(&self, z: f64) -> f64 {
        z * libm::sqrt(self.variance() / self.count as f64)
    }
}

/// Two-sample Kolmogorov-Smirnov statistic for integer samples given as
/// histograms over a common support starting at `min`.
pub fn ks_statistic_hist(a: &[u64], b: &[u64], total_a: u64, total_b: u64) -> f64 {
    let len = a.len().max(b.len());
    let (mut ca, mut cb) = (0u64, 0u64);
    let mut d: f64 = 0.0;
    for i in 0..len {
        ca += a.get(i).copied().unwrap_or(0);
        cb += b.get(i).copied().unwrap_or(0);
        let fa = ca as f64 / total_a as f64;
        let fb = cb as f64 / total_b as f64;
        d = d.max((fa - fb).abs());
    }
    d
}

/// Asymptotic two-sample KS critical value `c(alpha) * sqrt((m+n)/(m n))`.
pub fn ks_critical(c_alpha: f64, m: u64, n: u64) -> f64 {
    c_alpha * libm::sqrt((m + n) as f64 / (m as f64 * n as f64))
}

/// Histogram of integer observations with dense storage from `min`.
#[derive(Debug, Clone, Default)]
pub struct IntHistogram {
    pub min: u64,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl IntHistogram {
    pub fn push(&mut self, value: u64) {
        if self.total == 0 {
            self.min = value;
        }
        if value < self.min {
            let shift = (self.min - value) as usize;
            let mut counts = alloc::vec![0; self.counts.len() + shift];
            counts[shift..].copy_from_slice(&self.counts);
            self.counts = counts;
            self.min = value;
        }
        let idx = (value - self.min) as usize;
        if idx >= self.counts.len() {
            self.counts.resize(idx + 1, 0);
        }
        self.counts[idx] += 1;
        self.total += 1;
    }

    pub fn merge(&mut self, other: &IntHistogram) {
        for (i, &c) in other.counts.iter().enumerate() {
            if c > 0 {
                self.push_count(other.min + i as u64, c);
            }
        }
    }

    fn push_count(&mut self, value: u64, count: u64) {
        if self.total == 0 {
            self.min = value;
        }
        if value < self.min {
            let shift = (self.min - value) as usize;
            let mut counts = alloc::vec![0; self.counts.len() + shift];
            counts[shift..].copy_from_slice(&self.counts);
            self.counts = counts;
            self.min = value;
        }
        let idx = (value - self.min) as usize;
        if idx >= self.counts.len() {
            self.counts.resize(idx + 1, 0);
        }
        self.counts[idx] += count;
        self.total += count;
    }

    /// Normalized (value, probability) pairs over observed support.
    pub fn pmf(&self) -> Vec<(u64, f64)> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (self.min + i as u64, c as f64 / self.total as f64))
            .collect()
    }

    /// Empirical mean.
    pub fn mean(&self) -> f64 {
        let mut acc = 0u128;
        for (i, &c) in self.counts.iter().enumerate() {
            acc += u128::from(self.min + i as u64) * u128::from(c);
        }
        acc as f64 / self.total as f64
    }

    /// Most frequent value (smallest on ties).
    pub fn mode(&self) -> u64 {
        let mut best = (0usize, 0u64);
        for (i, &c) in self.counts.iter().enumerate() {
            if c > best.1 {
                best = (i, c);
            }
        }
        self.min + best.0 as u64
    }

    /// Rebuild the exact integer accumulator implied by the counts, so
    /// summaries derived from a histogram and from the raw trial stream
    /// agree bit for bit.
    pub fn to_accumulator(&self) -> Accumulator {
        let mut acc = Accumulator::default();
        for (i, &c) in self.counts.iter().enumerate() {
            let v = u128::from(self.min + i as u64);
            acc.count += c;
            acc.sum += v * u128::from(c);
            acc.sum_sq += v * v * u128::from(c);
        }
        acc
    }

    /// Probability mass within `radius` of `center` (inclusive).
    pub fn mass_within(&self, center: f64, radius: f64) -> f64 {
        let mut mass = 0u64;
        for (i, &c) in self.counts.iter().enumerate() {
            let v = (self.min + i as u64) as f64;
            if (v - center).abs() <= radius {
                mass += c;
            }
        }
        mass as f64 / self.total as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accumulator_mean_variance() {
        let mut a = Accumulator::default();
        for v in [2u64, 4, 4, 4, 5, 5, 7, 9] {
            a.push(v);
        }
        assert_eq!(a.mean(), 5.0);
        assert!((a.variance() - 32.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn merge_is_order_independent() {
        let (mut a, mut b, mut whole) = (
            Accumulator::default(),
            Accumulator::default(),
            Accumulator::default(),
        );
        for v in 0..100u64 {
            whole.push(v * v % 17);
            if v % 2 == 0 {
                a.push(v * v % 17);
            } else {
                b.push(v * v % 17);
            }
        }
        let mut ba = b;
        ba.merge(&a);
        a.merge(&b);
        assert_eq!(a.sum, whole.sum);
        assert_eq!(a.sum_sq, whole.sum_sq);
        assert_eq!(ba.sum, a.sum);
    }

    #[test]
    fn histogram_pmf_sums_to_one() {
        let mut h = IntHistogram::default();
        for v in [5u64, 3, 3, 8, 5, 5] {
            h.push(v);
        }
        let sum: f64 = h.pmf().iter().map(|&(_, p)| p).sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert_eq!(h.mode(), 5);
        assert_eq!(h.min, 3);
    }

    #[test]
    fn ks_of_identical_histograms_is_zero() {
        let a = [1u64, 2, 3, 4];
        assert_eq!(ks_statistic_hist(&a, &a, 10, 10), 0.0);
        let b = [10u64, 0, 0, 0];
        assert!(ks_statistic_hist(&a, &b, 10, 10) > 0.8);
    }
}
