//! Statistical properties of the simulators against exact references.
//!
//! Every check runs on a fixed seed, so outcomes are reproducible; the
//! tolerances are sized (5 standard errors unless a tighter figure is
//! exact) so that reseeding would virtually never flip a verdict.

use linedelay_core::model::NetworkConfig;
use linedelay_core::stats::{ks_critical, ks_statistic_hist, Accumulator, KS_C_01, Z_95, Z_99};
use linedelay_core::{analysis, markov, queue};

fn cfg(probs: &[f64], n: u64, seed: u64) -> NetworkConfig {
    NetworkConfig::new(probs.to_vec(), n, 8, seed).validate().unwrap()
}

/// Exact delay function for two links, small n: 2/0.7 - 1/0.85 etc.
#[test]
fn mc_mean_matches_closed_form_n2() {
    let c = cfg(&[0.5, 0.3], 2, 41);
    let est = queue::estimate_delay(&c, 1_000_000).unwrap();
    let exact = 4.0 + markov::closed_form_delay_two_hop(2, 0.5, 0.3).unwrap();
    assert!(
        (est.mean - exact).abs() <= est.half_width,
        "mean {} exact {exact} hw {}",
        est.mean,
        est.half_width
    );
}

/// The n = 50 mean sits between the n = 2 delay and the n-independent
/// bound: E T_50 in [100 + D(2), 100 + dbar].
#[test]
fn mc_mean_n50_within_monotonicity_bracket() {
    let c = cfg(&[0.5, 0.3], 50, 42);
    let est = queue::estimate_delay(&c, 300_000).unwrap();
    let lo = 100.0 + markov::closed_form_delay_two_hop(2, 0.5, 0.3).unwrap();
    let hi = 100.0 + analysis::delay_bound(&c).unwrap();
    assert!(
        est.mean >= lo - est.half_width && est.mean <= hi + est.half_width,
        "mean {} not in [{lo}, {hi}] +- {}",
        est.mean,
        est.half_width
    );
}

/// Mode and concentration of the empirical distribution at n = 50.
#[test]
fn empirical_pmf_n50_mode_and_mass() {
    let c = cfg(&[0.5, 0.3], 50, 43);
    let hist = queue::empirical_pmf(&c, 300_000).unwrap();
    let mode = hist.mode();
    assert!((98..=106).contains(&mode), "mode {mode}");
    // radius n^(3/4)/(1-p_m) = 37.6; tail bound at n=50 is 0.02, checked
    // loosely: at least 98% of the mass within the radius
    let mean = hist.mean();
    let radius = 50f64.powf(0.75) / 0.5;
    assert!(hist.mass_within(mean, radius) >= 0.98);
    let total: f64 = hist.pmf().iter().map(|&(_, p)| p).sum();
    assert!((total - 1.0).abs() < 1e-12);
}

/// Swapping the two links leaves the transfer-time distribution alone:
/// means agree within joint intervals and the two-sample KS statistic
/// stays under the 1% critical value.
#[test]
fn link_permutation_leaves_distribution_unchanged() {
    let trials = 100_000u64;
    let a = cfg(&[0.5, 0.3], 10, 44);
    let b = cfg(&[0.3, 0.5], 10, 45);
    let ha = queue::empirical_pmf(&a, trials).unwrap();
    let hb = queue::empirical_pmf(&b, trials).unwrap();

    let (mut acca, mut accb) = (Accumulator::default(), Accumulator::default());
    for (i, &c) in ha.counts.iter().enumerate() {
        (0..c).for_each(|_| acca.push(ha.min + i as u64));
    }
    for (i, &c) in hb.counts.iter().enumerate() {
        (0..c).for_each(|_| accb.push(hb.min + i as u64));
    }
    let joint = acca.half_width(Z_95) + accb.half_width(Z_95);
    assert!(
        (acca.mean() - accb.mean()).abs() <= joint,
        "means {} vs {}",
        acca.mean(),
        accb.mean()
    );

    // align histograms on a common origin before comparing CDFs
    let min = ha.min.min(hb.min);
    let pad = |h: &linedelay_core::stats::IntHistogram| {
        let mut v = vec![0u64; (h.min - min) as usize];
        v.extend_from_slice(&h.counts);
        v
    };
    let d = ks_statistic_hist(&pad(&ha), &pad(&hb), trials, trials);
    let crit = ks_critical(KS_C_01, trials, trials);
    assert!(d < crit, "KS {d} >= critical {crit}");
}

/// Empirical tail delay is non-decreasing in n (common random numbers,
/// half-width slack).
#[test]
fn tail_delay_monotone_in_batch_size() {
    let trials = 1_000_000u64;
    let mut prev: Option<(f64, f64)> = None;
    for n in 1..=10u64 {
        let c = cfg(&[0.5, 0.3], n, 46);
        let mut acc = Accumulator::default();
        for trial in 0..trials {
            acc.push(queue::run_trial(&c, trial, false).unwrap().tail_time);
        }
        let (mean, hw) = (acc.mean(), acc.half_width(Z_95));
        if let Some((pm, phw)) = prev {
            assert!(mean >= pm - (hw + phw), "n={n}: {mean} < {pm}");
        }
        prev = Some((mean, hw));
    }
}

/// Monte Carlo agrees with the exact solver at the 99% level.
#[test]
fn mc_matches_solver_two_and_three_links() {
    for (probs, n, seed) in [(vec![0.5, 0.3], 10u64, 47u64), (vec![0.5, 0.3, 0.2], 6, 48)] {
        let c = cfg(&probs, n, seed);
        let exact = markov::solve(&c, false).unwrap().expected_total;
        let mut acc = Accumulator::default();
        for trial in 0..100_000 {
            acc.push(queue::run_trial(&c, trial, false).unwrap().total_time);
        }
        let hw = acc.half_width(Z_99);
        assert!(
            (acc.mean() - exact).abs() <= hw,
            "{probs:?}: mean {} exact {exact} hw {hw}",
            acc.mean()
        );
    }
}

/// Reseeding shifts estimates within their intervals, not across them.
#[test]
fn verdicts_survive_reseeding() {
    for seed in [100u64, 200, 300] {
        let c = cfg(&[0.5, 0.3], 10, seed);
        let est = queue::estimate_delay(&c, 50_000).unwrap();
        let exact = markov::solve(&c, false).unwrap().expected_total;
        assert!(
            (est.mean - exact).abs() <= 2.0 * est.half_width,
            "seed {seed}: {} vs {exact}",
            est.mean
        );
    }
}
