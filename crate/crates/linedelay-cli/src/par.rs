//! Trial-parallel drivers.
//!
//! Trials are fully determined by `(seed, trial_index)` and aggregation is
//! exact integer arithmetic, so these produce bit-identical results to the
//! serial functions in `linedelay-core` regardless of thread count or
//! schedule.

use anyhow::Result;
use rayon::prelude::*;

use linedelay_core::model::NetworkConfig;
use linedelay_core::queue::{self, DelayEstimate};
use linedelay_core::rlnc::{self, FidelityReport};
use linedelay_core::stats::{Accumulator, IntHistogram};

/// Parallel [`queue::estimate_delay`].
pub fn estimate_delay(config: &NetworkConfig, trials: u64) -> Result<DelayEstimate> {
    let acc = (0..trials)
        .into_par_iter()
        .try_fold(Accumulator::default, |mut acc, trial| {
            acc.push(queue::run_trial(config, trial, false)?.total_time);
            Ok::<_, linedelay_core::Error>(acc)
        })
        .try_reduce(Accumulator::default, |mut a, b| {
            a.merge(&b);
            Ok(a)
        })?;
    Ok(queue::estimate_from_accumulator(config, &acc))
}

/// Parallel [`queue::empirical_pmf`].
pub fn empirical_pmf(config: &NetworkConfig, trials: u64) -> Result<IntHistogram> {
    let hist = (0..trials)
        .into_par_iter()
        .try_fold(IntHistogram::default, |mut h, trial| {
            h.push(queue::run_trial(config, trial, false)?.total_time);
            Ok::<_, linedelay_core::Error>(h)
        })
        .try_reduce(IntHistogram::default, |mut a, b| {
            a.merge(&b);
            Ok(a)
        })?;
    Ok(hist)
}

/// Parallel [`rlnc::compare_fidelities`].
pub fn compare_fidelities(config: &NetworkConfig, trials: u64) -> Result<FidelityReport> {
    let (q, r) = (0..trials)
        .into_par_iter()
        .try_fold(
            || (Accumulator::default(), Accumulator::default()),
            |(mut q, mut r), trial| {
                q.push(queue::run_trial(config, trial, false)?.total_time);
                r.push(rlnc::run_rlnc_trial(config, trial, false)?.total_time);
                Ok::<_, linedelay_core::Error>((q, r))
            },
        )
        .try_reduce(
            || (Accumulator::default(), Accumulator::default()),
            |(mut qa, mut ra), (qb, rb)| {
                qa.merge(&qb);
                ra.merge(&rb);
                Ok((qa, ra))
            },
        )?;
    Ok(rlnc::fidelity_from_accumulators(&q, &r))
}

/// Parallel [`linedelay_core::analysis::count_deviations`].
pub fn count_deviations(
    config: &NetworkConfig,
    trials: u64,
    center: f64,
    epsilon: f64,
) -> Result<u64> {
    let count = (0..trials)
        .into_par_iter()
        .try_fold(
            || 0u64,
            |acc, trial| {
                let t = queue::run_trial(config, trial, false)?.total_time as f64;
                Ok::<_, linedelay_core::Error>(acc + u64::from((t - center).abs() > epsilon))
            },
        )
        .try_reduce(|| 0u64, |a, b| Ok(a + b))?;
    Ok(count)
}

/// Parallel [`linedelay_core::analysis::sample_ranks`].
pub fn sample_ranks(config: &NetworkConfig, t: u64, trials: u64) -> Vec<u64> {
    (0..trials)
        .into_par_iter()
        .map(|trial| queue::rank_at(config, trial, t))
        .collect()
}
