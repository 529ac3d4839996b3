//! Closed-form bounds and concentration estimates, plus the drivers that
//! confront them with simulation.
//!
//! The expected transfer time splits into a capacity term `n/(1-p_m)` and
//! a delay function `D(n)` that is non-decreasing in `n` and bounded by
//! `dbar = sum_{i != m} p_m/(p_m - p_i)` whenever the worst link is
//! unique. The same sum, read with the worst link first, is the limit of
//! the expected tail delay (the steady-state end-to-end sojourn of a
//! single innovative packet).
//!
//! Concentration: the destination rank after `t` slots is a 1-Lipschitz
//! function of the independent per-slot link states, so an
//! Azuma-Hoeffding argument bounds its deviations by
//! `eps_t = sqrt(t*l/2 * ln(2t))` with failure probability `1/t`;
//! threading that through the crossing slots of `E R_t` around `n` yields
//! the two-term tail bound on `T_n` evaluated here.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::markov;
use crate::model::NetworkConfig;
use crate::queue;

/// The n-independent pieces of the delay decomposition for one network.
#[derive(Debug, Clone, Copy)]
pub struct BoundsReport {
    /// Capacity term `n / (1 - p_m)`.
    pub capacity_term: f64,
    /// Upper bound on the delay function; `None` when the worst link ties.
    pub dbar: Option<f64>,
    /// Steady-state tail delay (equals `dbar` after the worst link is
    /// moved first); `None` when the worst link ties.
    pub steady_tau: Option<f64>,
    /// True iff exactly one link attains the maximal erasure probability.
    pub unique_worst: bool,
}

/// Crossing slots of `E R_t` around the batch size.
#[derive(Debug, Clone, Copy)]
pub struct CrossingTimes {
    /// Largest slot known to satisfy `E R_t + eps_t <= n`.
    pub t_lower: f64,
    /// Smallest slot known to satisfy `E R_t - eps_t >= n`.
    pub t_upper: f64,
    /// False when `n^(1/2+delta') >= n`, which voids the construction.
    pub regime_valid: bool,
}

/// Tail bound on the transfer time plus the crossing-slot machinery
/// behind it.
#[derive(Debug, Clone, Copy)]
pub struct ConcentrationReport {
    pub n: u64,
    pub delta: f64,
    /// Deviation radius `n^(1/2+delta) / (1 - p_m)`.
    pub epsilon_n: f64,
    /// Two-term bound on `P(|T_n - E T_n| > epsilon_n)`.
    pub prob_bound: f64,
    /// True when the bound exceeds 1 and says nothing.
    pub bound_vacuous: bool,
    /// Crossing-slot exponent used internally (`delta / 2`).
    pub delta_prime: f64,
    pub crossing: CrossingTimes,
    /// Rank deviation radius at the upper crossing slot.
    pub azuma_epsilon_t: f64,
    /// Whether the crossing inequalities already clear numerically at this
    /// `n` with the bounded-in-flight surrogate; `None` when no surrogate
    /// is available (tied worst link or unknown). The tail bound is
    /// asymptotic: a `Some(false)` here flags the pre-asymptotic regime.
    pub clearance_ok: Option<bool>,
}

/// Empirical check of the transfer-time tail bound.
#[derive(Debug, Clone, Copy)]
pub struct DeviationReport {
    pub n: u64,
    pub trials: u64,
    /// Center used for deviations (exact solver value when in guard).
    pub expected_total: f64,
    pub epsilon: f64,
    pub exceed_count: u64,
    pub empirical_prob: f64,
    pub bound: f64,
    pub pass: bool,
    /// Set when the crossing inequalities do not yet clear at this `n`.
    pub asymptotic_warning: bool,
}

/// Empirical check of the destination-rank concentration at one slot.
#[derive(Debug, Clone, Copy)]
pub struct RankDeviationReport {
    pub t: u64,
    pub trials: u64,
    pub mean_rank: f64,
    pub epsilon_t: f64,
    pub exceed_count: u64,
    pub empirical_prob: f64,
    /// The `1/t` bound.
    pub bound: f64,
    pub pass: bool,
}

/// `dbar = sum_{i != m} p_m / (p_m - p_i)`; requires a unique worst link.
pub fn delay_bound(config: &NetworkConfig) -> Result<f64> {
    let worst = config.worst_link();
    if !worst.unique {
        return Err(Error::TiedWorstLink);
    }
    let pm = worst.prob;
    Ok(config
        .erasure_probs
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != worst.index - 1)
        .map(|(_, &p)| pm / (pm - p))
        .sum())
}

/// Steady-state tail delay `sum_{i >= 2} p_1 / (p_1 - p_i)`; the first
/// link must be strictly worse than every later one.
pub fn steady_state_tau(config: &NetworkConfig) -> Result<f64> {
    let p1 = config.erasure_probs[0];
    for (i, &p) in config.erasure_probs.iter().enumerate().skip(1) {
        if p >= p1 {
            return Err(Error::FirstLinkNotWorst { index: i, value: p });
        }
    }
    Ok(config
        .erasure_probs
        .iter()
        .skip(1)
        .map(|&p| p1 / (p1 - p))
        .sum())
}

/// All n-independent bound quantities for a network; tail limit computed
/// on the worst-link-first relabeling.
pub fn bounds_report(config: &NetworkConfig) -> BoundsReport {
    let worst = config.worst_link();
    let (dbar, steady_tau) = if worst.unique {
        (
            delay_bound(config).ok(),
            steady_state_tau(&config.worst_link_first()).ok(),
        )
    } else {
        (None, None)
    };
    BoundsReport {
        capacity_term: config.capacity_term(),
        dbar,
        steady_tau,
        unique_worst: worst.unique,
    }
}

/// Rank deviation radius `sqrt(t*l/2 * ln(2t))` after `t >= 1` slots over
/// `l` links.
pub fn azuma_epsilon(t: u64, links: usize) -> f64 {
    let t = t as f64;
    libm::sqrt(t * links as f64 / 2.0 * libm::log(2.0 * t))
}

/// Continuous extension of [`azuma_epsilon`] for non-integer slots.
fn azuma_epsilon_at(t: f64, links: usize) -> f64 {
    libm::sqrt(t * links as f64 / 2.0 * libm::log(2.0 * t))
}

/// Crossing slots `(n -+ n^(1/2+delta')) / capacity`.
pub fn crossing_times(n: u64, capacity: f64, delta_prime: f64) -> Result<CrossingTimes> {
    if !(0.0..0.5).contains(&delta_prime) || delta_prime == 0.0 {
        return Err(Error::DeltaOutOfRange { value: delta_prime });
    }
    let nf = n as f64;
    let spread = libm::pow(nf, 0.5 + delta_prime);
    Ok(CrossingTimes {
        t_lower: (nf - spread) / capacity,
        t_upper: (nf + spread) / capacity,
        regime_valid: spread < nf,
    })
}

/// Numeric clearance of the crossing inequalities with a bounded
/// in-flight surrogate `b`: using `capacity*t - b <= E R_t <= capacity*t`,
/// the upper slot needs `n^(1/2+delta') >= b + eps(t_upper)` and the lower
/// slot needs `n^(1/2+delta') >= eps(t_lower)`.
pub fn crossing_clearance(
    n: u64,
    links: usize,
    capacity: f64,
    surrogate_b: f64,
    delta_prime: f64,
) -> Result<(CrossingTimes, bool)> {
    let times = crossing_times(n, capacity, delta_prime)?;
    let spread = libm::pow(n as f64, 0.5 + delta_prime);
    let ok = times.regime_valid
        && spread >= surrogate_b + azuma_epsilon_at(times.t_upper, links)
        && spread >= azuma_epsilon_at(times.t_lower, links);
    Ok((times, ok))
}

/// Tail bound on `T_n` deviations of radius `n^(1/2+delta) / (1 - p_m)`:
/// `2(1-p_m)/n + 2(1-p_m) n^(2 delta) / (n^2 - n^(1+2 delta))`.
pub fn concentration_bound(
    n: u64,
    p_m: f64,
    links: usize,
    delta: f64,
) -> Result<ConcentrationReport> {
    if !(0.0..0.5).contains(&delta) || delta == 0.0 {
        return Err(Error::DeltaOutOfRange { value: delta });
    }
    let nf = n as f64;
    let a = 1.0 - p_m;
    let epsilon_n = libm::pow(nf, 0.5 + delta) / a;
    let n2 = nf * nf;
    let n12 = libm::pow(nf, 1.0 + 2.0 * delta);
    let prob_bound = 2.0 * a / nf + 2.0 * a * libm::pow(nf, 2.0 * delta) / (n2 - n12);
    let delta_prime = delta / 2.0;
    let crossing = crossing_times(n, a, delta_prime)?;
    Ok(ConcentrationReport {
        n,
        delta,
        epsilon_n,
        prob_bound,
        bound_vacuous: !(n2 > n12) || !(prob_bound > 0.0 && prob_bound <= 1.0),
        delta_prime,
        azuma_epsilon_t: azuma_epsilon_at(crossing.t_upper, links),
        crossing,
        clearance_ok: None,
    })
}

/// [`concentration_bound`] for a concrete network, with the crossing
/// clearance checked against the tail-delay bound as surrogate.
pub fn concentration_report(
    config: &NetworkConfig,
    n: u64,
    delta: f64,
) -> Result<ConcentrationReport> {
    let worst = config.worst_link();
    let mut report = concentration_bound(n, worst.prob, config.links(), delta)?;
    if let Ok(dbar) = delay_bound(config) {
        let (_, ok) = crossing_clearance(
            n,
            config.links(),
            1.0 - worst.prob,
            dbar,
            report.delta_prime,
        )?;
        report.clearance_ok = Some(ok);
    }
    Ok(report)
}

/// Seed offset separating reference-estimation trials from the trials
/// whose deviations they center.
pub const REFERENCE_SEED_OFFSET: u64 = 0x5EED_0FF5_E7;

/// Exact expected transfer time when the chain fits the solver guard,
/// otherwise a Monte Carlo estimate at `10 * trials` (kept separate from
/// the deviation-counting trials by a different seed stream offset).
pub fn reference_expected_total(config: &NetworkConfig, trials: u64) -> Result<f64> {
    match markov::solve(config, false) {
        Ok(solution) => Ok(solution.expected_total),
        Err(Error::StateSpaceTooLarge { .. }) => {
            let mut shifted = config.clone();
            shifted.seed = config.seed.wrapping_add(REFERENCE_SEED_OFFSET);
            Ok(queue::estimate_delay(&shifted, trials.saturating_mul(10))?.mean)
        }
        Err(e) => Err(e),
    }
}

/// Count trials whose transfer time deviates from `center` by more than
/// `epsilon`.
pub fn count_deviations(
    config: &NetworkConfig,
    trials: u64,
    center: f64,
    epsilon: f64,
) -> Result<u64> {
    let mut exceed = 0u64;
    for trial in 0..trials {
        let t = queue::run_trial(config, trial, false)?.total_time as f64;
        if (t - center).abs() > epsilon {
            exceed += 1;
        }
    }
    Ok(exceed)
}

/// Empirical tail-bound verification at deviation exponent `delta`.
pub fn verify_concentration(
    config: &NetworkConfig,
    n: u64,
    trials: u64,
    delta: f64,
) -> Result<DeviationReport> {
    let mut c = config.clone();
    c.batch_size = n;
    let report = concentration_report(&c, n, delta)?;
    let expected_total = reference_expected_total(&c, trials)?;
    let exceed = count_deviations(&c, trials, expected_total, report.epsilon_n)?;
    Ok(deviation_report(&report, expected_total, trials, exceed))
}

/// Assemble the empirical report once deviations are counted (useful when
/// the counting itself ran elsewhere, e.g. in parallel).
pub fn deviation_report(
    report: &ConcentrationReport,
    expected_total: f64,
    trials: u64,
    exceed_count: u64,
) -> DeviationReport {
    let empirical_prob = exceed_count as f64 / trials as f64;
    DeviationReport {
        n: report.n,
        trials,
        expected_total,
        epsilon: report.epsilon_n,
        exceed_count,
        empirical_prob,
        bound: report.prob_bound,
        pass: empirical_prob <= report.prob_bound,
        asymptotic_warning: report.clearance_ok != Some(true),
    }
}

/// Destination ranks after `t` slots across `trials` trials.
pub fn sample_ranks(config: &NetworkConfig, t: u64, trials: u64) -> Vec<u64> {
    (0..trials).map(|trial| queue::rank_at(config, trial, t)).collect()
}

/// Empirical rank-concentration verification: the deviation radius is
/// [`azuma_epsilon`] and the certified failure probability is `1/t`.
pub fn verify_rank_concentration(
    config: &NetworkConfig,
    t: u64,
    trials: u64,
) -> Result<RankDeviationReport> {
    let ranks = sample_ranks(config, t, trials);
    Ok(rank_deviation_report(config, t, &ranks))
}

/// Assemble the rank report from pre-sampled ranks.
pub fn rank_deviation_report(
    config: &NetworkConfig,
    t: u64,
    ranks: &[u64],
) -> RankDeviationReport {
    let trials = ranks.len() as u64;
    let sum: u128 = ranks.iter().map(|&r| u128::from(r)).sum();
    let mean_rank = sum as f64 / trials as f64;
    let epsilon_t = azuma_epsilon(t, config.links());
    let exceed_count = ranks
        .iter()
        .filter(|&&r| (r as f64 - mean_rank).abs() >= epsilon_t)
        .count() as u64;
    let empirical_prob = exceed_count as f64 / trials as f64;
    let bound = 1.0 / t as f64;
    RankDeviationReport {
        t,
        trials,
        mean_rank,
        epsilon_t,
        exceed_count,
        empirical_prob,
        bound,
        pass: empirical_prob <= bound,
    }
}
