//! One function per CLI subcommand: run the experiment, render the data
//! deterministically, emit to `--out` or stdout.

use std::path::Path;

use anyhow::Result;
use serde::Serialize;

use linedelay_core::analysis::{self, RankDeviationReport};
use linedelay_core::markov;
use linedelay_core::model::NetworkConfig;
use linedelay_core::Error;

use crate::configfile::Settings;
use crate::output::{emit, to_json_string, Column, Format, Table};
use crate::par;

#[derive(Serialize)]
struct ConfigEcho {
    links: Vec<f64>,
    n: u64,
    field_exponent: u32,
    seed: u64,
}

impl ConfigEcho {
    fn of(c: &NetworkConfig) -> Self {
        ConfigEcho {
            links: c.erasure_probs.clone(),
            n: c.batch_size,
            field_exponent: c.field_exponent,
            seed: c.seed,
        }
    }
}

fn links_cell(c: &NetworkConfig) -> String {
    c.erasure_probs
        .iter()
        .map(|p| crate::output::fmt_sig(*p))
        .collect::<Vec<_>>()
        .join(";")
}

/// `simulate`: Monte Carlo estimate of `E T_n`.
pub fn cmd_simulate(s: &Settings, format: Format, out: Option<&Path>) -> Result<()> {
    let est = par::estimate_delay(&s.config, s.trials)?;

    #[derive(Serialize)]
    struct Record {
        config: ConfigEcho,
        trials: u64,
        mean: f64,
        variance: f64,
        half_width: f64,
        capacity_term: f64,
        delay_function: f64,
        worst_unique: bool,
    }
    let content = match format {
        Format::Json => to_json_string(&Record {
            config: ConfigEcho::of(&s.config),
            trials: est.trials,
            mean: est.mean,
            variance: est.variance,
            half_width: est.half_width,
            capacity_term: est.capacity_term,
            delay_function: est.delay_function,
            worst_unique: est.worst_unique,
        }),
        Format::Csv => Table::new(
            vec![
                "links",
                "n",
                "seed",
                "trials",
                "mean",
                "variance",
                "half_width",
                "capacity_term",
                "delay_function",
            ],
            vec![
                Column::Text(vec![links_cell(&s.config)]),
                Column::Int(vec![s.config.batch_size]),
                Column::Int(vec![s.config.seed]),
                Column::Int(vec![est.trials]),
                Column::Float(vec![est.mean]),
                Column::Float(vec![est.variance]),
                Column::Float(vec![est.half_width]),
                Column::Float(vec![est.capacity_term]),
                Column::Float(vec![est.delay_function]),
            ],
        )
        .to_csv(),
    };
    emit(out, &content)
}

/// `exact`: absorbing-chain expectations.
pub fn cmd_exact(s: &Settings, format: Format, out: Option<&Path>) -> Result<()> {
    let chain = markov::build_chain(&s.config)?;
    let states = chain.space.count();
    let sol = markov::solve_expected(&chain)?;

    #[derive(Serialize)]
    struct Record {
        config: ConfigEcho,
        states: u64,
        expected_total: f64,
        expected_first_link: f64,
        expected_tail: f64,
        capacity_term: f64,
        delay_function: f64,
    }
    let content = match format {
        Format::Json => to_json_string(&Record {
            config: ConfigEcho::of(&s.config),
            states,
            expected_total: sol.expected_total,
            expected_first_link: sol.expected_first_link,
            expected_tail: sol.expected_tail,
            capacity_term: s.config.capacity_term(),
            delay_function: sol.delay_function,
        }),
        Format::Csv => Table::new(
            vec![
                "links",
                "n",
                "states",
                "expected_total",
                "expected_first_link",
                "expected_tail",
                "capacity_term",
                "delay_function",
            ],
            vec![
                Column::Text(vec![links_cell(&s.config)]),
                Column::Int(vec![s.config.batch_size]),
                Column::Int(vec![states]),
                Column::Float(vec![sol.expected_total]),
                Column::Float(vec![sol.expected_first_link]),
                Column::Float(vec![sol.expected_tail]),
                Column::Float(vec![s.config.capacity_term()]),
                Column::Float(vec![sol.delay_function]),
            ],
        )
        .to_csv(),
    };
    emit(out, &content)
}

/// `bounds`: capacity term, delay-function bound, steady-state tail.
pub fn cmd_bounds(s: &Settings, format: Format, out: Option<&Path>) -> Result<()> {
    let report = analysis::bounds_report(&s.config);

    #[derive(Serialize)]
    struct Record {
        config: ConfigEcho,
        capacity_term: f64,
        dbar: Option<f64>,
        steady_tau: Option<f64>,
        unique_worst: bool,
    }
    let content = match format {
        Format::Json => to_json_string(&Record {
            config: ConfigEcho::of(&s.config),
            capacity_term: report.capacity_term,
            dbar: report.dbar,
            steady_tau: report.steady_tau,
            unique_worst: report.unique_worst,
        }),
        Format::Csv => Table::new(
            vec!["links", "n", "capacity_term", "dbar", "steady_tau", "unique_worst"],
            vec![
                Column::Text(vec![links_cell(&s.config)]),
                Column::Int(vec![s.config.batch_size]),
                Column::Float(vec![report.capacity_term]),
                Column::Float(vec![report.dbar.unwrap_or(f64::INFINITY)]),
                Column::Float(vec![report.steady_tau.unwrap_or(f64::INFINITY)]),
                Column::Text(vec![report.unique_worst.to_string()]),
            ],
        )
        .to_csv(),
    };
    emit(out, &content)
}

#[derive(Serialize)]
struct PmfSummary {
    config: ConfigEcho,
    trials: u64,
    mean: f64,
    variance: f64,
    half_width: f64,
    capacity_term: f64,
    delay_function: f64,
    dbar: Option<f64>,
    exact_mean: Option<f64>,
    exact_delay_function: Option<f64>,
    exact_captured_mass: Option<f64>,
}

/// `pmf`: transfer-time distribution, Monte Carlo plus the exact solver
/// when the chain fits the guard. Data goes to `--out`; a summary JSON
/// record always goes to stdout.
pub fn cmd_pmf(s: &Settings, format: Format, out: Option<&Path>) -> Result<()> {
    let hist = par::empirical_pmf(&s.config, s.trials)?;
    let acc = hist.to_accumulator();
    let est = linedelay_core::queue::estimate_from_accumulator(&s.config, &acc);

    let exact = match markov::solve(&s.config, true) {
        Ok(sol) => Some(sol),
        Err(Error::StateSpaceTooLarge { .. }) => None,
        Err(e) => return Err(e.into()),
    };

    let mut t_col: Vec<u64> = Vec::new();
    let mut p_col: Vec<f64> = Vec::new();
    let mut src_col: Vec<String> = Vec::new();
    for (t, p) in hist.pmf() {
        t_col.push(t);
        p_col.push(p);
        src_col.push("mc".to_string());
    }
    if let Some(sol) = &exact {
        for (t, p) in sol.pmf.as_ref().unwrap().support() {
            t_col.push(t);
            p_col.push(p);
            src_col.push("exact".to_string());
        }
    }
    let table = Table::new(
        vec!["t", "probability", "source"],
        vec![Column::Int(t_col), Column::Float(p_col), Column::Text(src_col)],
    );
    emit(out, &table.render(format))?;

    let summary = PmfSummary {
        config: ConfigEcho::of(&s.config),
        trials: s.trials,
        mean: est.mean,
        variance: est.variance,
        half_width: est.half_width,
        capacity_term: est.capacity_term,
        delay_function: est.delay_function,
        dbar: analysis::delay_bound(&s.config).ok(),
        exact_mean: exact.as_ref().map(|e| e.expected_total),
        exact_delay_function: exact.as_ref().map(|e| e.delay_function),
        exact_captured_mass: exact.as_ref().and_then(|e| e.pmf.as_ref()).map(|p| p.captured),
    };
    if out.is_some() {
        print!("{}", to_json_string(&summary));
    }
    Ok(())
}

/// `convergence`: delay function over a batch-size range against its
/// n-independent bound; exact while the chain fits, Monte Carlo beyond.
pub fn cmd_convergence(s: &Settings, format: Format, out: Option<&Path>) -> Result<()> {
    let (lo, hi) = s.n_range;
    let dbar = analysis::delay_bound(&s.config)
        .unwrap_or(if s.config.links() == 1 { 0.0 } else { f64::INFINITY });
    let mut n_col = Vec::new();
    let mut d_col = Vec::new();
    let mut hw_col = Vec::new();
    let mut dbar_col = Vec::new();
    let mut src_col: Vec<String> = Vec::new();
    for n in lo..=hi {
        let mut c = s.config.clone();
        c.batch_size = n;
        let (d, hw, src) = match markov::solve(&c, false) {
            Ok(sol) => (sol.delay_function, 0.0, "exact"),
            Err(Error::StateSpaceTooLarge { .. }) => {
                let est = par::estimate_delay(&c, s.trials)?;
                (est.delay_function, est.half_width, "mc")
            }
            Err(e) => return Err(e.into()),
        };
        n_col.push(n);
        d_col.push(d);
        hw_col.push(hw);
        dbar_col.push(dbar);
        src_col.push(src.to_string());
    }
    let table = Table::new(
        vec!["n", "delay", "half_width", "dbar", "source"],
        vec![
            Column::Int(n_col),
            Column::Float(d_col),
            Column::Float(hw_col),
            Column::Float(dbar_col),
            Column::Text(src_col),
        ],
    );
    emit(out, &table.render(format))
}

/// `concentration`: tail bound for `T_n` plus empirical verification, and
/// the rank-concentration check at slot `t`.
pub fn cmd_concentration(s: &Settings, format: Format, out: Option<&Path>) -> Result<()> {
    let n = s.config.batch_size;
    let report = analysis::concentration_report(&s.config, n, s.delta)?;
    let expected_total = reference_expected_total(&s.config, s.trials)?;
    let exceed = par::count_deviations(&s.config, s.trials, expected_total, report.epsilon_n)?;
    let deviation = analysis::deviation_report(&report, expected_total, s.trials, exceed);
    let ranks = par::sample_ranks(&s.config, s.t, s.trials);
    let rank: RankDeviationReport = analysis::rank_deviation_report(&s.config, s.t, &ranks);

    #[derive(Serialize)]
    struct Record {
        config: ConfigEcho,
        trials: u64,
        delta: f64,
        epsilon_n: f64,
        prob_bound: f64,
        bound_vacuous: bool,
        t_lower: f64,
        t_upper: f64,
        expected_total: f64,
        exceed_count: u64,
        empirical_prob: f64,
        pass: bool,
        asymptotic_warning: bool,
        t: u64,
        epsilon_t: f64,
        rank_mean: f64,
        rank_exceed_count: u64,
        rank_empirical_prob: f64,
        rank_bound: f64,
        rank_pass: bool,
    }
    let record = Record {
        config: ConfigEcho::of(&s.config),
        trials: s.trials,
        delta: s.delta,
        epsilon_n: report.epsilon_n,
        prob_bound: report.prob_bound,
        bound_vacuous: report.bound_vacuous,
        t_lower: report.crossing.t_lower,
        t_upper: report.crossing.t_upper,
        expected_total,
        exceed_count: deviation.exceed_count,
        empirical_prob: deviation.empirical_prob,
        pass: deviation.pass,
        asymptotic_warning: deviation.asymptotic_warning,
        t: s.t,
        epsilon_t: rank.epsilon_t,
        rank_mean: rank.mean_rank,
        rank_exceed_count: rank.exceed_count,
        rank_empirical_prob: rank.empirical_prob,
        rank_bound: rank.bound,
        rank_pass: rank.pass,
    };
    let content = match format {
        Format::Json => to_json_string(&record),
        Format::Csv => Table::new(
            vec![
                "n",
                "delta",
                "epsilon_n",
                "prob_bound",
                "empirical_prob",
                "pass",
                "t",
                "epsilon_t",
                "rank_empirical_prob",
                "rank_bound",
                "rank_pass",
            ],
            vec![
                Column::Int(vec![n]),
                Column::Float(vec![record.delta]),
                Column::Float(vec![record.epsilon_n]),
                Column::Float(vec![record.prob_bound]),
                Column::Float(vec![record.empirical_prob]),
                Column::Text(vec![record.pass.to_string()]),
                Column::Int(vec![record.t]),
                Column::Float(vec![record.epsilon_t]),
                Column::Float(vec![record.rank_empirical_prob]),
                Column::Float(vec![record.rank_bound]),
                Column::Text(vec![record.rank_pass.to_string()]),
            ],
        )
        .to_csv(),
    };
    emit(out, &content)?;
    if deviation.asymptotic_warning && out.is_some() {
        eprintln!(
            "note: the tail bound is asymptotic and its crossing inequalities do not yet clear at n = {n}"
        );
    }
    Ok(())
}

/// Exact expected total when the solver guard allows, else a tenfold
/// Monte Carlo reference on a shifted seed (run in parallel).
fn reference_expected_total(config: &NetworkConfig, trials: u64) -> Result<f64> {
    match markov::solve(config, false) {
        Ok(sol) => Ok(sol.expected_total),
        Err(Error::StateSpaceTooLarge { .. }) => {
            let mut shifted = config.clone();
            shifted.seed = config.seed.wrapping_add(analysis::REFERENCE_SEED_OFFSET);
            Ok(par::estimate_delay(&shifted, trials.saturating_mul(10))?.mean)
        }
        Err(e) => Err(e.into()),
    }
}

/// `compare`: queue-level vs packet-level means under common erasures.
pub fn cmd_compare(s: &Settings, format: Format, out: Option<&Path>) -> Result<()> {
    let rep = par::compare_fidelities(&s.config, s.trials)?;

    #[derive(Serialize)]
    struct Record {
        config: ConfigEcho,
        trials: u64,
        queue_mean: f64,
        rlnc_mean: f64,
        gap: f64,
        queue_half_width: f64,
        rlnc_half_width: f64,
    }
    let content = match format {
        Format::Json => to_json_string(&Record {
            config: ConfigEcho::of(&s.config),
            trials: rep.trials,
            queue_mean: rep.queue_mean,
            rlnc_mean: rep.rlnc_mean,
            gap: rep.gap,
            queue_half_width: rep.queue_half_width,
            rlnc_half_width: rep.rlnc_half_width,
        }),
        Format::Csv => Table::new(
            vec![
                "links",
                "n",
                "field_exponent",
                "trials",
                "queue_mean",
                "rlnc_mean",
                "gap",
                "queue_half_width",
                "rlnc_half_width",
            ],
            vec![
                Column::Text(vec![links_cell(&s.config)]),
                Column::Int(vec![s.config.batch_size]),
                Column::Int(vec![u64::from(s.config.field_exponent)]),
                Column::Int(vec![rep.trials]),
                Column::Float(vec![rep.queue_mean]),
                Column::Float(vec![rep.rlnc_mean]),
                Column::Float(vec![rep.gap]),
                Column::Float(vec![rep.queue_half_width]),
                Column::Float(vec![rep.rlnc_half_width]),
            ],
        )
        .to_csv(),
    };
    emit(out, &content)
}
