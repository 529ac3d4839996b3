//! Packet-level Monte Carlo over GF(2^q): nodes store the span of what
//! they received and transmit genuine random linear combinations.
//!
//! This is the ground-truth simulator the queue abstraction approximates:
//! over a finite field a transmission can be non-innovative even when the
//! sender holds a rank advantage (probability at most `2^-q`), so per
//! trial the packet-level transfer time can only match or exceed the
//! queue-level one when both consume the same erasure draws.
//!
//! Erasure streams are keyed exactly as in [`crate::queue`] and advance
//! once per link per slot, so a `(seed, trial)` pair pins the same erasure
//! pattern in both simulators. Coefficient draws live on separate per-node
//! streams; erased transmissions are never materialized (drawing them
//! would change nothing observable).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gf::{random_combination, CoefficientVector, FieldContext, RankTracker};
use crate::model::NetworkConfig;
use crate::queue::{self, TrialOutcome, TRIAL_SLOT_CAP};
use crate::rng::{DetStream, ErasureStream, StreamKind};
use crate::stats::{Accumulator, Z_95};

/// Side-by-side means of the two simulators under common erasure draws.
#[derive(Debug, Clone, Copy)]
pub struct FidelityReport {
    pub trials: u64,
    pub queue_mean: f64,
    pub rlnc_mean: f64,
    /// `rlnc_mean - queue_mean`; nonnegative by the domination coupling.
    pub gap: f64,
    pub queue_half_width: f64,
    pub rlnc_half_width: f64,
}

/// Run one packet-level trial to completion.
pub fn run_rlnc_trial(
    config: &NetworkConfig,
    trial_index: u64,
    capture_trace: bool,
) -> Result<TrialOutcome> {
    let ctx = FieldContext::new(config.field_exponent)?;
    let links = config.links();
    let n = config.batch_size as usize;

    let mut erasure: Vec<ErasureStream> = (0..links)
        .map(|i| ErasureStream::new(config.seed, trial_index, i as u32, config.erasure_probs[i]))
        .collect();
    let mut coeff: Vec<DetStream> = (0..links)
        .map(|i| DetStream::new(config.seed, trial_index, i as u32, StreamKind::Coefficient))
        .collect();

    // nodes[0] is the source (always full rank); nodes[links] the destination
    let mut nodes: Vec<RankTracker> = Vec::with_capacity(links + 1);
    nodes.push(RankTracker::full(n));
    for _ in 0..links {
        nodes.push(RankTracker::new(n));
    }

    let mut pending: Vec<Option<CoefficientVector>> = vec![None; links];
    let mut trace = capture_trace.then(Vec::new);
    let mut first_link_time = 0u64;
    let mut slot = 0u64;
    while !nodes[links].is_complete() {
        slot += 1;
        if slot > TRIAL_SLOT_CAP {
            return Err(Error::TrialCapExceeded { cap: TRIAL_SLOT_CAP });
        }
        // Draw all transmissions from pre-slot stores first, then deliver:
        // a packet received this slot is combinable only from the next one.
        for i in 0..links {
            let up = erasure[i].next();
            pending[i] = if up && nodes[i].rank() > 0 {
                Some(random_combination(&ctx, nodes[i].rows(), &mut coeff[i])?)
            } else {
                None
            };
        }
        for i in 0..links {
            if let Some(v) = pending[i].take() {
                nodes[i + 1].insert(&ctx, &v)?;
            }
        }
        if first_link_time == 0 && nodes[1].rank() == n {
            first_link_time = slot;
        }
        if let Some(t) = trace.as_mut() {
            t.push(nodes[links].rank() as u64);
        }
    }
    Ok(TrialOutcome {
        total_time: slot,
        first_link_time,
        tail_time: slot - first_link_time,
        rank_trace: trace,
    })
}

/// Run both simulators over the same trials (hence the same erasure
/// patterns) and report the finite-field gap.
pub fn compare_fidelities(config: &NetworkConfig, trials: u64) -> Result<FidelityReport> {
    let mut q = Accumulator::default();
    let mut r = Accumulator::default();
    for trial in 0..trials {
        q.push(queue::run_trial(config, trial, false)?.total_time);
        r.push(run_rlnc_trial(config, trial, false)?.total_time);
    }
    Ok(fidelity_from_accumulators(&q, &r))
}

/// Assemble a report from separately aggregated accumulators.
pub fn fidelity_from_accumulators(queue: &Accumulator, rlnc: &Accumulator) -> FidelityReport {
    FidelityReport {
        trials: queue.count,
        queue_mean: queue.mean(),
        rlnc_mean: rlnc.mean(),
        gap: rlnc.mean() - queue.mean(),
        queue_half_width: queue.half_width(Z_95),
        rlnc_half_width: rlnc.half_width(Z_95),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::NetworkConfig;

    fn cfg(probs: &[f64], n: u64, q: u32, seed: u64) -> NetworkConfig {
        NetworkConfig::new(probs.to_vec(), n, q, seed).validate().unwrap()
    }

    #[test]
    fn perfect_link_large_field_is_nearly_lossless() {
        // non-innovative draws occur with probability <= 2^-16 per slot
        let c = cfg(&[0.0], 3, 16, 5);
        let mut acc = Accumulator::default();
        for trial in 0..10_000 {
            let out = run_rlnc_trial(&c, trial, false).unwrap();
            assert!(out.total_time >= 3);
            acc.push(out.total_time);
        }
        assert!(acc.mean() <= 3.01, "mean = {}", acc.mean());
    }

    #[test]
    fn single_packet_two_perfect_links_gf256() {
        // T = 2 unless a zero coefficient vector is drawn (p = 1/256/slot)
        let c = cfg(&[0.0, 0.0], 1, 8, 6);
        let trials = 20_000u64;
        let mut acc = Accumulator::default();
        for trial in 0..trials {
            acc.push(run_rlnc_trial(&c, trial, false).unwrap().total_time);
        }
        // each extra slot costs one zero-draw; expected extra ~ 2/256
        assert!(acc.mean() >= 2.0);
        assert!(acc.mean() <= 2.0 + 3.0 * (2.0 / 256.0), "mean = {}", acc.mean());
    }

    #[test]
    fn domination_per_trial_with_common_erasures() {
        let c = cfg(&[0.5, 0.3], 8, 8, 7);
        for trial in 0..2_000 {
            let q = queue::run_trial(&c, trial, false).unwrap();
            let r = run_rlnc_trial(&c, trial, false).unwrap();
            assert!(
                r.total_time >= q.total_time,
                "trial {trial}: rlnc {} < queue {}",
                r.total_time,
                q.total_time
            );
        }
    }

    #[test]
    fn nested_subspaces_along_the_line() {
        let c = cfg(&[0.4, 0.2, 0.5], 5, 4, 8);
        // re-run the trial loop manually to observe per-slot ranks
        let ctx = FieldContext::new(c.field_exponent).unwrap();
        let links = c.links();
        let n = c.batch_size as usize;
        for trial in 0..200 {
            let mut erasure: Vec<ErasureStream> = (0..links)
                .map(|i| ErasureStream::new(c.seed, trial, i as u32, c.erasure_probs[i]))
                .collect();
            let mut coeff: Vec<DetStream> = (0..links)
                .map(|i| DetStream::new(c.seed, trial, i as u32, StreamKind::Coefficient))
                .collect();
            let mut nodes: Vec<RankTracker> = Vec::with_capacity(links + 1);
            nodes.push(RankTracker::full(n));
            for _ in 0..links {
                nodes.push(RankTracker::new(n));
            }
            let mut pending: Vec<Option<CoefficientVector>> = alloc::vec![None; links];
            while !nodes[links].is_complete() {
                for i in 0..links {
                    let up = erasure[i].next();
                    pending[i] = if up && nodes[i].rank() > 0 {
                        Some(random_combination(&ctx, nodes[i].rows(), &mut coeff[i]).unwrap())
                    } else {
                        None
                    };
                }
                for i in 0..links {
                    if let Some(v) = pending[i].take() {
                        nodes[i + 1].insert(&ctx, &v).unwrap();
                    }
                }
                for w in nodes.windows(2) {
                    assert!(w[0].rank() >= w[1].rank(), "ranks not nested");
                }
            }
        }
    }

    #[test]
    fn trace_and_decomposition_match_queue_semantics() {
        let c = cfg(&[0.5, 0.3], 6, 16, 9);
        for trial in 0..200 {
            let out = run_rlnc_trial(&c, trial, true).unwrap();
            assert_eq!(out.total_time, out.first_link_time + out.tail_time);
            let trace = out.rank_trace.unwrap();
            assert_eq!(trace.len() as u64, out.total_time);
            assert_eq!(*trace.last().unwrap(), 6);
            let mut prev = 0u64;
            for &r in &trace {
                assert!(r >= prev && r - prev <= 1);
                prev = r;
            }
        }
    }

    #[test]
    fn gap_shrinks_as_field_grows() {
        let mut means = Vec::new();
        for q in [1u32, 4, 8, 16] {
            let c = cfg(&[0.5, 0.3], 6, q, 10);
            let rep = compare_fidelities(&c, 3_000).unwrap();
            assert!(rep.gap >= 0.0, "q={q}: gap {}", rep.gap);
            means.push((rep.gap, rep.rlnc_half_width + rep.queue_half_width));
        }
        for w in means.windows(2) {
            let (g0, hw0) = w[0];
            let (g1, hw1) = w[1];
            assert!(g1 <= g0 + hw0 + hw1, "gap grew: {g0} -> {g1}");
        }
        // GF(2) pays a visibly larger penalty than GF(2^16)
        assert!(means[0].0 > means[3].0);
    }

    #[test]
    fn near_perfect_fidelity_at_q16() {
        let c = cfg(&[0.5, 0.3], 10, 16, 11);
        let rep = compare_fidelities(&c, 2_000).unwrap();
        assert!(rep.gap >= -1e-12);
        assert!(
            rep.gap <= 0.05 * 10.0 + rep.queue_half_width + rep.rlnc_half_width,
            "gap = {}",
            rep.gap
        );
    }
}
