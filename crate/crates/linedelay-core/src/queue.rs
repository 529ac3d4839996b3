//! Monte Carlo simulation over the innovative-packet abstraction.
//!
//! Per the tandem-queue reduction, only the per-link rank differences
//! matter: each slot, every link with a queued unit and an up channel
//! forwards one unit, all decisions taken on pre-slot counts. A trial runs
//! until all `n` units reach the destination.
//!
//! Every link's erasure stream advances once per slot whether or not the
//! link had something to send, so the same `(seed, trial)` key produces
//! the same erasure pattern here and in the packet-level simulator.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{NetworkConfig, QueueState};
use crate::rng::ErasureStream;
use crate::stats::{Accumulator, IntHistogram, Z_95};

/// Hard per-trial slot cap; unreachable for valid configs at desk scale.
pub const TRIAL_SLOT_CAP: u64 = 1_000_000_000;

/// Result of one simulated batch transfer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialOutcome {
    /// Slot at which the destination completed the batch.
    pub total_time: u64,
    /// Slot at which the source queue first drained (n-th success of the
    /// first link).
    pub first_link_time: u64,
    /// Remaining tail after the first link drained.
    pub tail_time: u64,
    /// Destination rank after each slot `1..=total_time`, when captured.
    pub rank_trace: Option<Vec<u64>>,
}

/// Monte Carlo estimate of the expected transfer time.
#[derive(Debug, Clone, Copy)]
pub struct DelayEstimate {
    /// Sample mean of the transfer time.
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    /// 95% normal-approximation half-width of the mean.
    pub half_width: f64,
    /// Number of trials aggregated.
    pub trials: u64,
    /// Implied delay-function estimate: mean minus the capacity term.
    pub delay_function: f64,
    /// Capacity term `n / (1 - p_m)` that was subtracted.
    pub capacity_term: f64,
    /// False when the worst link is tied (the n-independent bound is then
    /// undefined, though this estimate remains valid).
    pub worst_unique: bool,
}

/// Run one trial to completion.
///
/// `capture_trace` records the destination rank after every slot, at the
/// cost of one `Vec` push per slot.
pub fn run_trial(
    config: &NetworkConfig,
    trial_index: u64,
    capture_trace: bool,
) -> Result<TrialOutcome> {
    let links = config.links();
    let n = config.batch_size;
    let mut streams: Vec<ErasureStream> = (0..links)
        .map(|i| ErasureStream::new(config.seed, trial_index, i as u32, config.erasure_probs[i]))
        .collect();
    let mut state = QueueState::initial(n, links);
    let mut up = alloc::vec![false; links];
    let mut trace = capture_trace.then(Vec::new);

    let mut destination_rank = 0u64;
    let mut first_link_time = 0u64;
    let mut slot = 0u64;
    while destination_rank < n {
        slot += 1;
        if slot > TRIAL_SLOT_CAP {
            return Err(Error::TrialCapExceeded { cap: TRIAL_SLOT_CAP });
        }
        for (u, s) in up.iter_mut().zip(streams.iter_mut()) {
            *u = s.next();
        }
        destination_rank += state.step(&up);
        if first_link_time == 0 && state.diffs[0] == 0 {
            first_link_time = slot;
        }
        if let Some(t) = trace.as_mut() {
            t.push(destination_rank);
        }
    }
    Ok(TrialOutcome {
        total_time: slot,
        first_link_time,
        tail_time: slot - first_link_time,
        rank_trace: trace,
    })
}

/// Destination rank after exactly `t` slots (equals `n` if the batch
/// completed earlier). Cheaper than a full trace when only one time index
/// matters.
pub fn rank_at(config: &NetworkConfig, trial_index: u64, t: u64) -> u64 {
    let links = config.links();
    let n = config.batch_size;
    let mut streams: Vec<ErasureStream> = (0..links)
        .map(|i| ErasureStream::new(config.seed, trial_index, i as u32, config.erasure_probs[i]))
        .collect();
    let mut state = QueueState::initial(n, links);
    let mut up = alloc::vec![false; links];
    let mut destination_rank = 0u64;
    for _ in 0..t {
        if destination_rank == n {
            break;
        }
        for (u, s) in up.iter_mut().zip(streams.iter_mut()) {
            *u = s.next();
        }
        destination_rank += state.step(&up);
    }
    destination_rank
}

/// Aggregate `trials` independent trials into a [`DelayEstimate`].
///
/// Deterministic given `(config.seed, trials)`; trial indices `0..trials`.
pub fn estimate_delay(config: &NetworkConfig, trials: u64) -> Result<DelayEstimate> {
    let mut acc = Accumulator::default();
    for trial in 0..trials {
        acc.push(run_trial(config, trial, false)?.total_time);
    }
    Ok(estimate_from_accumulator(config, &acc))
}

/// Turn an accumulator of per-trial times into the estimate record.
pub fn estimate_from_accumulator(config: &NetworkConfig, acc: &Accumulator) -> DelayEstimate {
    let worst = config.worst_link();
    let capacity = config.capacity_term();
    let mean = acc.mean();
    DelayEstimate {
        mean,
        variance: acc.variance(),
        half_width: acc.half_width(Z_95),
        trials: acc.count,
        delay_function: mean - capacity,
        capacity_term: capacity,
        worst_unique: worst.unique,
    }
}

/// Normalized histogram of transfer times over `trials` trials.
pub fn empirical_pmf(config: &NetworkConfig, trials: u64) -> Result<IntHistogram> {
    let mut hist = IntHistogram::default();
    for trial in 0..trials {
        hist.push(run_trial(config, trial, false)?.total_time);
    }
    Ok(hist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::NetworkConfig;

    fn cfg(probs: &[f64], n: u64, seed: u64) -> NetworkConfig {
        NetworkConfig::new(probs.to_vec(), n, 8, seed).validate().unwrap()
    }

    #[test]
    fn perfect_single_link_takes_n_slots() {
        let c = cfg(&[0.0], 5, 1);
        let out = run_trial(&c, 0, false).unwrap();
        assert_eq!(out.total_time, 5);
        assert_eq!(out.first_link_time, 5);
        assert_eq!(out.tail_time, 0);
    }

    #[test]
    fn perfect_pipeline_fills_then_streams() {
        let c = cfg(&[0.0, 0.0, 0.0], 4, 1);
        let out = run_trial(&c, 0, true).unwrap();
        assert_eq!(out.total_time, 4 + 3 - 1);
        assert_eq!(out.first_link_time, 4);
        assert_eq!(out.tail_time, 2);
        // trace: destination sees nothing for l-1 slots, then one per slot
        assert_eq!(out.rank_trace.unwrap(), alloc::vec![0, 0, 1, 2, 3, 4]);
    }

    #[test]
    fn single_packet_single_link_is_geometric() {
        // E T = 1/(1-p) = 2 at p = 0.5; 10^5 trials land within 0.05.
        let c = cfg(&[0.5], 1, 7);
        let mut acc = Accumulator::default();
        for trial in 0..100_000 {
            acc.push(run_trial(&c, trial, false).unwrap().total_time);
        }
        assert!((acc.mean() - 2.0).abs() < 0.05, "mean = {}", acc.mean());
    }

    #[test]
    fn decomposition_identity_holds_per_trial() {
        let c = cfg(&[0.5, 0.3], 12, 3);
        for trial in 0..200 {
            let out = run_trial(&c, trial, false).unwrap();
            assert_eq!(out.total_time, out.first_link_time + out.tail_time);
            assert!(out.first_link_time >= 12);
        }
    }

    #[test]
    fn trace_is_monotone_lipschitz_and_completes() {
        let c = cfg(&[0.5, 0.3], 10, 4);
        for trial in 0..100 {
            let out = run_trial(&c, trial, true).unwrap();
            let trace = out.rank_trace.unwrap();
            assert_eq!(trace.len() as u64, out.total_time);
            assert_eq!(*trace.last().unwrap(), 10);
            let mut prev = 0u64;
            for (slot, &r) in trace.iter().enumerate() {
                assert!(r >= prev && r - prev <= 1, "slot {slot}");
                prev = r;
            }
            // first time the trace reaches n is exactly total_time
            let first_full = trace.iter().position(|&r| r == 10).unwrap() as u64 + 1;
            assert_eq!(first_full, out.total_time);
        }
    }

    #[test]
    fn rank_at_matches_trace() {
        let c = cfg(&[0.5, 0.3], 8, 9);
        for trial in 0..50 {
            let trace = run_trial(&c, trial, true).unwrap().rank_trace.unwrap();
            for t in [1u64, 3, 7, 200] {
                let expect = if t as usize <= trace.len() {
                    trace[t as usize - 1]
                } else {
                    8
                };
                assert_eq!(rank_at(&c, trial, t), expect);
            }
        }
    }

    #[test]
    fn estimate_single_link_n100() {
        // E T = n/(1-p) = 200 exactly.
        let c = cfg(&[0.5], 100, 11);
        let est = estimate_delay(&c, 100_000).unwrap();
        assert!(
            (est.mean - 200.0).abs() <= est.half_width,
            "mean {} hw {}",
            est.mean,
            est.half_width
        );
        assert_eq!(est.trials, 100_000);
        assert!(est.worst_unique);
        assert!((est.capacity_term - 200.0).abs() < 1e-12);
    }

    #[test]
    fn estimate_is_deterministic_and_tie_flagged() {
        let c = cfg(&[0.4, 0.4], 5, 21);
        let a = estimate_delay(&c, 2000).unwrap();
        let b = estimate_delay(&c, 2000).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert!(!a.worst_unique);
    }

    #[test]
    fn pmf_geometric_bins() {
        // l=1, p=0.5, n=1: P(T=k) = 0.5^k, each bin within 5 SE.
        let c = cfg(&[0.5], 1, 13);
        let trials = 100_000u64;
        let hist = empirical_pmf(&c, trials).unwrap();
        assert_eq!(hist.min, 1);
        for (k, p_hat) in hist.pmf() {
            if k > 12 {
                break;
            }
            let p = libm::pow(0.5, k as f64);
            let se = libm::sqrt(p * (1.0 - p) / trials as f64);
            assert!((p_hat - p).abs() <= 5.0 * se, "k={k} p_hat={p_hat} p={p}");
        }
        let total: f64 = hist.pmf().iter().map(|&(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pmf_deterministic_pipeline_is_a_spike() {
        let c = cfg(&[0.0, 0.0], 6, 1);
        let hist = empirical_pmf(&c, 500).unwrap();
        assert_eq!(hist.pmf(), alloc::vec![(7u64, 1.0)]);
    }
}
