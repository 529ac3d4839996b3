//! Deterministic, splittable randomness.
//!
//! Every random draw in this crate comes from a [`DetStream`] keyed by
//! `(seed, trial, link)` (plus a purpose tag separating erasure draws from
//! coefficient draws). Streams are counter-based: the state advances by a
//! fixed odd constant and each output is a strong 64-bit mix of the state,
//! so a stream is a pure function of its key and position. Trials can run
//! in any order, on any number of threads, and reproduce bit-identically.

/// Weyl increment for the counter sequence (2^64 / golden ratio, odd).
const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Purpose tag separating the independent stream families of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamKind {
    /// Per-link Bernoulli erasure draws.
    Erasure,
    /// Per-node field-coefficient draws for random recoding.
    Coefficient,
}

impl StreamKind {
    fn tag(self) -> u64 {
        match self {
            StreamKind::Erasure => 0x45,
            StreamKind::Coefficient => 0xC0,
        }
    }
}

/// A deterministic pseudo-random stream (counter mode, 64-bit outputs).
#[derive(Debug, Clone)]
pub struct DetStream {
    state: u64,
}

/// 64-bit finalizer with full avalanche.
#[inline(always)]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl DetStream {
    /// Stream for a given `(seed, trial, link)` key and purpose.
    ///
    /// Distinct keys yield statistically independent streams; identical
    /// keys yield bit-identical streams on every platform.
    pub fn new(seed: u64, trial: u64, link: u32, kind: StreamKind) -> Self {
        let mut k = mix64(seed ^ GOLDEN_GAMMA);
        k = mix64(k ^ trial);
        k = mix64(k ^ ((kind.tag() << 32) | u64::from(link)));
        DetStream { state: k }
    }

    /// Next raw 64-bit output.
    #[inline(always)]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Draw an event of probability `threshold / 2^64`.
    ///
    /// With [`erasure_threshold`], a zero threshold (p = 0) never fires.
    #[inline(always)]
    pub fn next_event(&mut self, threshold: u64) -> bool {
        self.next_u64() < threshold
    }

    /// Uniform field element below `2^q`, via `mask = 2^q - 1`.
    #[inline(always)]
    pub fn next_element(&mut self, mask: u16) -> u16 {
        (self.next_u64() as u16) & mask
    }
}

/// Bernoulli stream for one link of one trial: `next()` reports whether the
/// slot's transmission attempt succeeded.
#[derive(Debug, Clone)]
pub struct ErasureStream {
    stream: DetStream,
    threshold: u64,
}

impl ErasureStream {
    pub fn new(seed: u64, trial: u64, link: u32, erasure_prob: f64) -> Self {
        ErasureStream {
            stream: DetStream::new(seed, trial, link, StreamKind::Erasure),
            threshold: erasure_threshold(erasure_prob),
        }
    }

    /// True iff the transmission of this slot goes through (not erased).
    #[inline(always)]
    pub fn next(&mut self) -> bool {
        !self.stream.next_event(self.threshold)
    }
}

/// Map an erasure probability in `[0, 1)` to a 64-bit comparison threshold.
///
/// `p = 0` maps to 0 (no erasures, exactly); `p = 0.5` maps to `2^63`.
#[inline]
pub fn erasure_threshold(p: f64) -> u64 {
    (p * 18_446_744_073_709_551_616.0) as u64
}

/// Stream of per-link erasure draws as specified by a `(seed, trial, link)`
/// key: the building block both simulators share.
pub fn derive_stream(seed: u64, trial: u64, link: u32) -> DetStream {
    DetStream::new(seed, trial, link, StreamKind::Erasure)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_keys_agree_bit_for_bit() {
        let mut a = derive_stream(42, 7, 1);
        let mut b = derive_stream(42, 7, 1);
        for _ in 0..1_000_000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn distinct_links_are_uncorrelated() {
        // Pearson correlation of the two Bernoulli(1/2) indicator streams
        // over 10^6 draws must sit within 4 standard errors of zero.
        let n = 1_000_000usize;
        let mut a = derive_stream(42, 0, 1);
        let mut b = derive_stream(42, 0, 2);
        let (mut sa, mut sb, mut sab) = (0i64, 0i64, 0i64);
        for _ in 0..n {
            let x = (a.next_u64() >> 63) as i64;
            let y = (b.next_u64() >> 63) as i64;
            sa += x;
            sb += y;
            sab += x * y;
        }
        let nf = n as f64;
        let (ma, mb) = (sa as f64 / nf, sb as f64 / nf);
        let cov = sab as f64 / nf - ma * mb;
        let corr = cov / libm::sqrt(ma * (1.0 - ma) * mb * (1.0 - mb));
        assert!(corr.abs() < 4.0 / libm::sqrt(nf), "corr = {corr}");
    }

    #[test]
    fn zero_probability_never_erases() {
        let mut s = ErasureStream::new(9, 3, 0, 0.0);
        for _ in 0..10_000 {
            assert!(s.next());
        }
    }

    #[test]
    fn success_rate_tracks_probability() {
        // Empirical success rate within 5 standard errors of 1 - p.
        for (seed, p) in [(1u64, 0.5f64), (2, 0.3), (3, 0.9), (4, 0.01)] {
            let n = 1_000_000u32;
            let mut s = ErasureStream::new(seed, 0, 0, p);
            let successes = (0..n).filter(|_| s.next()).count() as f64;
            let rate = successes / f64::from(n);
            let se = libm::sqrt(p * (1.0 - p) / f64::from(n));
            assert!(
                (rate - (1.0 - p)).abs() <= 5.0 * se,
                "p = {p}: rate = {rate}"
            );
        }
    }

    #[test]
    fn purpose_tags_split_streams() {
        let mut e = DetStream::new(5, 0, 0, StreamKind::Erasure);
        let mut c = DetStream::new(5, 0, 0, StreamKind::Coefficient);
        assert_ne!(e.next_u64(), c.next_u64());
    }

    #[test]
    fn threshold_endpoints() {
        assert_eq!(erasure_threshold(0.0), 0);
        assert_eq!(erasure_threshold(0.5), 1u64 << 63);
    }
}
