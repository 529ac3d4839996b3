//! Exact expectations and distributions from the absorbing Markov chain of
//! the queue abstraction.
//!
//! The state is the full vector of rank differences `d = (d_1..d_l)` with
//! `sum d <= n`; the all-zero state is absorbing. The chain is leveled: a
//! slot either conserves `sum d` or (on a delivery) lowers it by one, and
//! within a level every move strictly decreases the prefix-sum tuple. The
//! states are therefore enumerated level by level (lex ascending within a
//! level), which makes the expected-hitting-time system triangular: one
//! forward pass of back-substitution solves it exactly, with no iterative
//! tolerance.
//!
//! Indices come from combinatorial ranking over the composition space, so
//! encoding is O(l) arithmetic against a binomial table and the inverse is
//! exact for every state.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{NetworkConfig, QueueState};

/// Refuse to build chains beyond this many states.
pub const STATE_GUARD: u64 = 10_000_000;

/// A solved pmf of the transfer time: `probs[t-1] = P(T = t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimePmf {
    pub probs: Vec<f64>,
    /// Probability mass captured within the horizon.
    pub captured: f64,
    /// True iff `captured >= 1 - 1e-9`; otherwise the horizon was too
    /// small and `captured` tells how much survived.
    pub complete: bool,
}

impl TimePmf {
    /// Mean of the captured mass (renormalization left to the caller).
    pub fn mean(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, &p)| (i as f64 + 1.0) * p)
            .sum()
    }

    /// Pairs `(t, P(T = t))` over the captured support.
    pub fn support(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, &p)| (i as u64 + 1, p))
    }
}

/// Mass threshold below which a pmf horizon counts as incomplete.
pub const PMF_MASS_TARGET: f64 = 1.0 - 1e-9;

/// Exact solution of one chain.
#[derive(Debug, Clone)]
pub struct ChainSolution {
    /// Batch size the chain was built for.
    pub batch_size: u64,
    /// Exact expected transfer time.
    pub expected_total: f64,
    /// Expected time for the batch to clear the first link, `n/(1-p_1)`.
    pub expected_first_link: f64,
    /// Expected tail after the first link drains (by subtraction).
    pub expected_tail: f64,
    /// Delay function: expected total minus the capacity term `n/(1-p_m)`.
    pub delay_function: f64,
    /// Transfer-time distribution, when requested.
    pub pmf: Option<TimePmf>,
}

/// Combinatorial index over `{d : sum d <= n}`, leveled by `sum d`.
#[derive(Debug, Clone)]
pub struct StateSpace {
    links: usize,
    batch: u64,
    /// `binom[m][k]` = C(m, k), m <= n + l, k <= l.
    binom: Vec<Vec<u64>>,
    /// `level_offsets[s]` = global index of the first level-`s` state.
    level_offsets: Vec<u64>,
}

impl StateSpace {
    pub fn new(batch: u64, links: usize) -> Result<Self> {
        let count = composition_count(batch, links);
        if count > u128::from(STATE_GUARD) {
            return Err(Error::StateSpaceTooLarge {
                states: count.min(u128::from(u64::MAX)) as u64,
                guard: STATE_GUARD,
            });
        }
        let rows = batch as usize + links + 1;
        let mut binom = vec![vec![0u64; links + 1]; rows];
        for row in binom.iter_mut() {
            row[0] = 1;
        }
        // Pascal; every value here is bounded by the state count guard.
        for m in 1..rows {
            for k in 1..=links {
                binom[m][k] = binom[m - 1][k] + binom[m - 1][k - 1];
            }
        }
        let mut level_offsets = Vec::with_capacity(batch as usize + 2);
        let mut acc = 0u64;
        for s in 0..=batch {
            level_offsets.push(acc);
            acc += binom[s as usize + links - 1][links - 1];
        }
        level_offsets.push(acc);
        Ok(StateSpace {
            links,
            batch,
            binom,
            level_offsets,
        })
    }

    pub fn links(&self) -> usize {
        self.links
    }

    pub fn batch(&self) -> u64 {
        self.batch
    }

    /// Total number of states, `C(n + l, l)`.
    pub fn count(&self) -> u64 {
        *self.level_offsets.last().unwrap()
    }

    /// Index of the initial state `(n, 0, .., 0)` (lex-largest of level n).
    pub fn initial_index(&self) -> u64 {
        self.count() - 1
    }

    fn c(&self, m: u64, k: usize) -> u64 {
        self.binom[m as usize][k]
    }

    /// Global index of a state (level offset plus lex rank within level).
    pub fn encode(&self, diffs: &[u64]) -> u64 {
        debug_assert_eq!(diffs.len(), self.links);
        let level: u64 = diffs.iter().sum();
        let mut rank = 0u64;
        let mut remaining = level;
        for (i, &d) in diffs.iter().enumerate().take(self.links - 1) {
            let k = self.links - 1 - i;
            // # states with a smaller value at this position:
            // sum_{v < d} C(remaining - v + k - 1, k - 1)
            //   = C(remaining + k, k) - C(remaining - d + k, k)
            rank += self.c(remaining + k as u64, k) - self.c(remaining - d + k as u64, k);
            remaining -= d;
        }
        self.level_offsets[level as usize] + rank
    }

    /// Inverse of [`encode`].
    pub fn decode(&self, index: u64) -> Vec<u64> {
        let level = match self.level_offsets.binary_search(&index) {
            Ok(s) => s as u64,
            Err(s) => s as u64 - 1,
        };
        let mut rank = index - self.level_offsets[level as usize];
        let mut remaining = level;
        let mut out = vec![0u64; self.links];
        for i in 0..self.links - 1 {
            let k = self.links - 1 - i;
            let total = self.c(remaining + k as u64, k);
            let mut d = 0u64;
            while d < remaining {
                // rank of the first state with value d + 1 at this position
                let upto = total - self.c(remaining - d - 1 + k as u64, k);
                if rank < upto {
                    break;
                }
                d += 1;
            }
            rank -= total - self.c(remaining - d + k as u64, k);
            out[i] = d;
            remaining -= d;
        }
        out[self.links - 1] = remaining;
        out
    }

    /// Visit every level-`s` state in lex-ascending order.
    pub fn for_each_in_level(&self, s: u64, mut f: impl FnMut(&[u64])) {
        let mut scratch = vec![0u64; self.links];
        fill_level(&mut scratch, 0, s, &mut f);
    }
}

fn fill_level(scratch: &mut [u64], pos: usize, remaining: u64, f: &mut impl FnMut(&[u64])) {
    if pos == scratch.len() - 1 {
        scratch[pos] = remaining;
        f(scratch);
        return;
    }
    for v in 0..=remaining {
        scratch[pos] = v;
        fill_level(scratch, pos + 1, remaining - v, f);
    }
}

fn composition_count(batch: u64, links: usize) -> u128 {
    // C(n + l, l), bailing out early once past the guard
    let mut acc: u128 = 1;
    for i in 1..=links as u128 {
        acc = acc * (u128::from(batch) + i) / i;
        if acc > 4 * u128::from(STATE_GUARD) {
            return acc;
        }
    }
    acc
}

/// Transition structure in CSR layout, states ordered by (level, lex).
#[derive(Debug, Clone)]
pub struct Chain {
    pub space: StateSpace,
    config: NetworkConfig,
    row_offsets: Vec<usize>,
    targets: Vec<u32>,
    probs: Vec<f64>,
}

impl Chain {
    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    /// Transition row of one state as (target, probability) pairs.
    pub fn row(&self, state: u64) -> impl Iterator<Item = (u64, f64)> + '_ {
        let r = self.row_offsets[state as usize]..self.row_offsets[state as usize + 1];
        self.targets[r.clone()]
            .iter()
            .zip(&self.probs[r])
            .map(|(&t, &p)| (u64::from(t), p))
    }
}

/// Enumerate every state's outgoing transitions.
///
/// Links with an empty queue cannot move, so their up/down outcome is
/// marginalized away: each row enumerates the `2^a` outcomes of the `a`
/// active links only. Rows sum to one exactly up to float rounding.
pub fn build_chain(config: &NetworkConfig) -> Result<Chain> {
    let config = config.clone().validate()?;
    let links = config.links();
    let n = config.batch_size;
    let space = StateSpace::new(n, links)?;
    let count = space.count();

    let mut row_offsets = Vec::with_capacity(count as usize + 1);
    let mut targets: Vec<u32> = Vec::new();
    let mut probs: Vec<f64> = Vec::new();
    row_offsets.push(0);

    // absorbing state (index 0): self-loop
    targets.push(0);
    probs.push(1.0);
    row_offsets.push(targets.len());

    let mut active = Vec::with_capacity(links);
    let mut up = vec![false; links];
    let mut next = QueueState::new(vec![0; links]);
    for s in 1..=n {
        space.for_each_in_level(s, |d| {
            active.clear();
            active.extend(d.iter().enumerate().filter(|(_, &v)| v >= 1).map(|(i, _)| i));
            let row_start = targets.len();
            for bits in 0u32..(1u32 << active.len()) {
                let mut prob = 1.0f64;
                up.iter_mut().for_each(|u| *u = false);
                for (j, &link) in active.iter().enumerate() {
                    if bits & (1 << j) != 0 {
                        up[link] = true;
                        prob *= 1.0 - config.erasure_probs[link];
                    } else {
                        prob *= config.erasure_probs[link];
                    }
                }
                next.diffs.copy_from_slice(d);
                next.step(&up);
                let tgt = space.encode(&next.diffs) as u32;
                // merge duplicate targets within the row
                match targets[row_start..].iter().position(|&t| t == tgt) {
                    Some(k) => probs[row_start + k] += prob,
                    None => {
                        targets.push(tgt);
                        probs.push(prob);
                    }
                }
            }
            row_offsets.push(targets.len());
        });
    }

    Ok(Chain {
        space,
        config,
        row_offsets,
        targets,
        probs,
    })
}

/// Expected absorption time from the initial state, plus the capacity
/// decomposition, via one triangular back-substitution pass.
pub fn solve_expected(chain: &Chain) -> Result<ChainSolution> {
    let count = chain.space.count() as usize;
    let mut h = vec![0.0f64; count];
    for idx in 1..count {
        let mut stay = 0.0f64;
        let mut acc = 1.0f64;
        for (tgt, p) in chain.row(idx as u64) {
            if tgt == idx as u64 {
                stay += p;
            } else {
                debug_assert!(tgt < idx as u64, "target outside triangular order");
                acc += p * h[tgt as usize];
            }
        }
        let leave = 1.0 - stay;
        if leave <= 1e-15 {
            return Err(Error::SingularSystem { state_index: idx });
        }
        h[idx] = acc / leave;
    }
    let config = chain.config();
    let n = config.batch_size as f64;
    let expected_total = h[chain.space.initial_index() as usize];
    let expected_first_link = n / (1.0 - config.erasure_probs[0]);
    Ok(ChainSolution {
        batch_size: config.batch_size,
        expected_total,
        expected_first_link,
        expected_tail: expected_total - expected_first_link,
        delay_function: expected_total - config.capacity_term(),
        pmf: None,
    })
}

/// Distribution of the absorption time by forward propagation.
///
/// Runs the full `horizon` (stopping early only once the entire mass has
/// been absorbed to float precision); `complete` reports whether at least
/// `1 - 1e-9` of the mass landed inside it.
pub fn solve_pmf(chain: &Chain, horizon: u64) -> TimePmf {
    let count = chain.space.count() as usize;
    let mut dist = vec![0.0f64; count];
    let mut next = vec![0.0f64; count];
    dist[chain.space.initial_index() as usize] = 1.0;
    let mut probs = Vec::new();
    let mut absorbed_before = 0.0f64;
    for _ in 0..horizon {
        next.iter_mut().for_each(|x| *x = 0.0);
        for (idx, &mass) in dist.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            for (tgt, p) in chain.row(idx as u64) {
                next[tgt as usize] += mass * p;
            }
        }
        core::mem::swap(&mut dist, &mut next);
        let absorbed = dist[0];
        probs.push(absorbed - absorbed_before);
        absorbed_before = absorbed;
        if 1.0 - absorbed == 0.0 {
            break;
        }
    }
    TimePmf {
        probs,
        captured: absorbed_before,
        complete: absorbed_before >= PMF_MASS_TARGET,
    }
}

/// Build and solve in one call, optionally with the distribution.
pub fn solve(config: &NetworkConfig, with_pmf: bool) -> Result<ChainSolution> {
    let chain = build_chain(config)?;
    let mut solution = solve_expected(&chain)?;
    if with_pmf {
        let horizon = pmf_horizon(solution.expected_total);
        solution.pmf = Some(solve_pmf(&chain, horizon));
    }
    Ok(solution)
}

/// Horizon comfortably past the geometric tail of the transfer time.
pub fn pmf_horizon(expected_total: f64) -> u64 {
    (expected_total * 8.0) as u64 + 256
}

/// Closed-form delay function for two links and batch sizes 1 through 4.
///
/// Cross-validated against [`solve_expected`]; the solver stays the
/// authority if a row is ever found to disagree.
pub fn closed_form_delay_two_hop(n: u64, p1: f64, p2: f64) -> Result<f64> {
    let m = p1.max(p2);
    let d = match n {
        1 => 1.0 / (1.0 - p1) - 1.0 / (1.0 - m) + 1.0 / (1.0 - p2),
        2 => 2.0 / (1.0 - p1) - 2.0 / (1.0 - m) + 2.0 / (1.0 - p2) - 1.0 / (1.0 - p1 * p2),
        3 => {
            let num = 1.0
                + p2 * (2.0
                    - p1 * (6.0 - p1
                        + (2.0 - 5.0 * p1) * p2
                        + (1.0 - 3.0 * (1.0 - p1) * p1) * p2 * p2));
            let den = (1.0 - p2) * cube(1.0 - p1 * p2);
            3.0 / (1.0 - p1) - 3.0 / (1.0 - m) + num / den
        }
        4 => {
            let p1_2 = p1 * p1;
            let num = 1.0
                + p2 * (3.0
                    - p1 * (11.0
                        + 4.0 * p1_2 * p1_2 * p2 * p2 * p2 * p2
                        + p2 * (5.0 + (5.0 - p2) * p2)
                        + p1_2 * p1 * p2 * (1.0 - p2 * (5.0 + 2.0 * p2 * (5.0 + 3.0 * p2)))
                        - p1 * (4.0 + p2 * (15.0 + p2 * (21.0 - (1.0 - p2) * p2)))
                        + p1_2 * (1.0 - p2 * (1.0 - p2 * (31.0 + p2 * (5.0 + 4.0 * p2))))));
            let den = (1.0 - p2) * cube(1.0 - p1 * p2) * sq(1.0 - p1 * p2);
            4.0 / (1.0 - p1) - 4.0 / (1.0 - m) + num / den
        }
        _ => return Err(Error::ClosedFormOutOfRange { n }),
    };
    Ok(d)
}

#[inline]
fn sq(x: f64) -> f64 {
    x * x
}

#[inline]
fn cube(x: f64) -> f64 {
    x * x * x
}

/// Exact delay function over a range of batch sizes.
pub fn delay_sequence(
    config: &NetworkConfig,
    ns: impl IntoIterator<Item = u64>,
) -> Result<Vec<(u64, f64)>> {
    let mut out = Vec::new();
    for n in ns {
        let mut c = config.clone();
        c.batch_size = n;
        let solution = solve(&c, false)?;
        out.push((n, solution.delay_function));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::NetworkConfig;

    fn cfg(probs: &[f64], n: u64) -> NetworkConfig {
        NetworkConfig::new(probs.to_vec(), n, 8, 1).validate().unwrap()
    }

    #[test]
    fn state_count_matches_composition_space() {
        // l=2, n=2: {(0,0),(0,1),(1,0),(0,2),(1,1),(2,0)}
        let space = StateSpace::new(2, 2).unwrap();
        assert_eq!(space.count(), 6);
        let space = StateSpace::new(1, 1).unwrap();
        assert_eq!(space.count(), 2);
    }

    #[test]
    fn encode_decode_roundtrip_everywhere() {
        for (n, links) in [(1u64, 1usize), (2, 2), (5, 3), (4, 4), (9, 2)] {
            let space = StateSpace::new(n, links).unwrap();
            let mut seen = 0u64;
            for s in 0..=n {
                space.for_each_in_level(s, |d| {
                    let idx = space.encode(d);
                    assert_eq!(space.decode(idx), d, "n={n} l={links}");
                    seen += 1;
                });
            }
            assert_eq!(seen, space.count());
            // enumeration order equals index order
            let mut expect = 0u64;
            for s in 0..=n {
                space.for_each_in_level(s, |d| {
                    assert_eq!(space.encode(d), expect);
                    expect += 1;
                });
            }
        }
    }

    #[test]
    fn initial_state_is_last_index() {
        let space = StateSpace::new(7, 3).unwrap();
        assert_eq!(space.encode(&[7, 0, 0]), space.initial_index());
    }

    #[test]
    fn guard_rejects_huge_spaces() {
        let err = StateSpace::new(100_000, 4).unwrap_err();
        assert!(matches!(err, Error::StateSpaceTooLarge { .. }));
        let msg = alloc::format!("{err}");
        assert!(msg.contains("Monte Carlo"), "{msg}");
    }

    #[test]
    fn rows_sum_to_one() {
        for config in [cfg(&[0.5, 0.3], 6), cfg(&[0.2, 0.7, 0.4], 4), cfg(&[0.9], 3)] {
            let chain = build_chain(&config).unwrap();
            for idx in 0..chain.space.count() {
                let sum: f64 = chain.row(idx).map(|(_, p)| p).sum();
                assert!((sum - 1.0).abs() < 1e-12, "row {idx}: {sum}");
            }
        }
    }

    #[test]
    fn two_state_single_packet_chain() {
        // l=1, n=1: {absorbed, d=1}; absorbs w.p. 1-p per slot.
        let chain = build_chain(&cfg(&[0.4], 1)).unwrap();
        assert_eq!(chain.space.count(), 2);
        let row: Vec<_> = chain.row(1).collect();
        assert!(row.contains(&(0u64, 0.6)));
        assert!(row.contains(&(1u64, 0.4)));
    }

    #[test]
    fn one_hop_state_moves_or_stays() {
        // l=2, n=1, state (1,0): to (0,1) w.p. 1-p1, stays w.p. p1.
        let chain = build_chain(&cfg(&[0.5, 0.3], 1)).unwrap();
        let from = chain.space.encode(&[1, 0]);
        let to = chain.space.encode(&[0, 1]);
        let row: Vec<_> = chain.row(from).collect();
        assert_eq!(row.len(), 2);
        assert!(row.contains(&(to, 0.5)));
        assert!(row.contains(&(from, 0.5)));
    }

    #[test]
    fn geometric_sum_single_link() {
        // l=1, p=0.5, n=3: E T = 3/(1-0.5) = 6 exactly.
        let s = solve(&cfg(&[0.5], 3), false).unwrap();
        assert!((s.expected_total - 6.0).abs() < 1e-12);
        assert!((s.delay_function - 0.0).abs() < 1e-12);
        assert!((s.expected_tail - 0.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_reference_values() {
        // (0.5, 0.3): D(1) = 10/7, D(2) = 200/119,
        // D(3) = 63530/34391, D(4) = 19542800/9938999.
        let expect = [
            1.428571428571429,
            1.680672268907563,
            1.847285627053590,
            1.966274470899998,
        ];
        for (i, &e) in expect.iter().enumerate() {
            let d = closed_form_delay_two_hop(i as u64 + 1, 0.5, 0.3).unwrap();
            assert!((d - e).abs() < 1e-9, "n={} got {d} want {e}", i + 1);
        }
        assert!(matches!(
            closed_form_delay_two_hop(5, 0.5, 0.3),
            Err(Error::ClosedFormOutOfRange { n: 5 })
        ));
        assert!(matches!(
            closed_form_delay_two_hop(0, 0.5, 0.3),
            Err(Error::ClosedFormOutOfRange { n: 0 })
        ));
    }

    #[test]
    fn closed_form_equal_links_n1() {
        // the max cancels the first term: D(1, p, p) = 1/(1-p)
        for p in [0.0, 0.2, 0.5, 0.77] {
            let d = closed_form_delay_two_hop(1, p, p).unwrap();
            assert!((d - 1.0 / (1.0 - p)).abs() < 1e-12);
        }
    }

    #[test]
    fn solver_matches_closed_forms() {
        for n in 1..=4u64 {
            for &p1 in &[0.1, 0.3, 0.5, 0.7, 0.9] {
                for &p2 in &[0.1, 0.3, 0.5, 0.7, 0.9] {
                    let s = solve(&cfg(&[p1, p2], n), false).unwrap();
                    let d = closed_form_delay_two_hop(n, p1, p2).unwrap();
                    assert!(
                        (s.delay_function - d).abs() <= 1e-9,
                        "n={n} p=({p1},{p2}): solver {} table {d}",
                        s.delay_function
                    );
                }
            }
        }
    }

    #[test]
    fn solution_reference_values() {
        // E T_3 at (0.5, 0.3) = 2*3 + 63530/34391
        let s = solve(&cfg(&[0.5, 0.3], 3), false).unwrap();
        assert!((s.expected_total - 7.847285627053590).abs() < 1e-10);
        // l=3 reference: (0.5, 0.3, 0.2), n=6
        let s = solve(&cfg(&[0.5, 0.3, 0.2], 6), false).unwrap();
        assert!((s.expected_total - 15.669808329837).abs() < 1e-9, "{}", s.expected_total);
    }

    #[test]
    fn decomposition_fields_are_consistent() {
        for config in [cfg(&[0.5, 0.3], 9), cfg(&[0.5, 0.3, 0.2], 5), cfg(&[0.3, 0.6], 4)] {
            let s = solve(&config, false).unwrap();
            assert!(
                (s.expected_total - (s.expected_first_link + s.expected_tail)).abs() < 1e-10
            );
            assert!(
                (s.delay_function - (s.expected_total - config.capacity_term())).abs() < 1e-10
            );
        }
    }

    #[test]
    fn pmf_geometric_single_link() {
        let chain = build_chain(&cfg(&[0.5], 1)).unwrap();
        let pmf = solve_pmf(&chain, 80);
        assert!(pmf.complete);
        for (t, p) in pmf.support() {
            assert!((p - libm::pow(0.5, t as f64)).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn pmf_pipeline_point_mass() {
        let chain = build_chain(&cfg(&[0.0, 0.0, 0.0], 4)).unwrap();
        let pmf = solve_pmf(&chain, 50);
        let support: Vec<_> = pmf.support().collect();
        assert_eq!(support, alloc::vec![(6u64, 1.0)]);
    }

    #[test]
    fn pmf_mean_matches_expectation() {
        let chain = build_chain(&cfg(&[0.5, 0.3], 2)).unwrap();
        let expected = solve_expected(&chain).unwrap().expected_total;
        let pmf = solve_pmf(&chain, 2000);
        assert!(pmf.complete);
        assert!((pmf.mean() - expected).abs() < 1e-9);
    }

    #[test]
    fn pmf_short_horizon_reports_partial_mass() {
        let chain = build_chain(&cfg(&[0.5, 0.3], 10)).unwrap();
        let pmf = solve_pmf(&chain, 12);
        assert!(!pmf.complete);
        assert!(pmf.captured < 0.5);
        assert_eq!(pmf.probs.len(), 12);
    }

    #[test]
    fn reversal_leaves_pmf_unchanged() {
        // departure-process invariance under permuting the links
        for (probs, n) in [
            (alloc::vec![0.5, 0.3], 5u64),
            (alloc::vec![0.2, 0.6, 0.4], 4),
        ] {
            let mut rev = probs.clone();
            rev.reverse();
            let a = solve_pmf(&build_chain(&cfg(&probs, n)).unwrap(), 600);
            let b = solve_pmf(&build_chain(&cfg(&rev, n)).unwrap(), 600);
            let len = a.probs.len().max(b.probs.len());
            for t in 0..len {
                let pa = a.probs.get(t).copied().unwrap_or(0.0);
                let pb = b.probs.get(t).copied().unwrap_or(0.0);
                assert!((pa - pb).abs() <= 1e-10, "t={} {pa} {pb}", t + 1);
            }
        }
    }

    #[test]
    fn tail_expectation_approaches_limit_from_below() {
        // E tau_n must rise toward p1/(p1-p2) = 2.5 at (0.5, 0.3)
        let mut prev = 0.0;
        for n in 1..=12u64 {
            let s = solve(&cfg(&[0.5, 0.3], n), false).unwrap();
            assert!(s.expected_tail >= prev - 1e-10, "n={n}");
            assert!(s.expected_tail <= 2.5 + 1e-10, "n={n}");
            prev = s.expected_tail;
        }
        let tau4 = solve(&cfg(&[0.5, 0.3], 4), false).unwrap().expected_tail;
        let tau12 = solve(&cfg(&[0.5, 0.3], 12), false).unwrap().expected_tail;
        assert!((tau4 - 1.9662744709).abs() < 1e-9);
        assert!((tau12 - 2.3430901192).abs() < 1e-9);
        assert!(tau12 > tau4);
    }

    #[test]
    fn delay_sequence_monotone_under_bound() {
        let seq = delay_sequence(&cfg(&[0.5, 0.3], 1), 1..=12).unwrap();
        for w in seq.windows(2) {
            assert!(w[1].1 >= w[0].1 - 1e-10);
        }
        for &(n, d) in &seq {
            assert!(d <= 2.5 + 1e-10, "n={n}");
        }
        assert!((seq[0].1 - 1.4285714285714286).abs() < 1e-10);
    }

    #[test]
    fn single_link_delay_function_is_zero() {
        let seq = delay_sequence(&cfg(&[0.7], 1), [1, 5, 20]).unwrap();
        for &(_, d) in &seq {
            assert!(d.abs() < 1e-10);
        }
    }
}
