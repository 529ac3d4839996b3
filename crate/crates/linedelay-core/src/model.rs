//! Shared domain types: the line-network description and the tandem-queue
//! state both simulators and the exact solver operate on.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Description of a line network: a source and a destination joined by a
/// chain of erasure links, carrying one batch of coded packets.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    /// Per-link erasure probabilities `p_1..p_l`, each in `[0, 1)`.
    pub erasure_probs: Vec<f64>,
    /// Number of packets in the batch (`n >= 1`).
    pub batch_size: u64,
    /// Field exponent `q` for the packet-level simulator (GF(2^q), 1..=16).
    pub field_exponent: u32,
    /// Master seed from which all per-trial randomness derives.
    pub seed: u64,
}

impl NetworkConfig {
    pub fn new(erasure_probs: Vec<f64>, batch_size: u64, field_exponent: u32, seed: u64) -> Self {
        NetworkConfig {
            erasure_probs,
            batch_size,
            field_exponent,
            seed,
        }
    }

    /// Number of links in the chain.
    pub fn links(&self) -> usize {
        self.erasure_probs.len()
    }

    /// Check every invariant, returning the config unchanged when valid.
    ///
    /// Rejections name the offending field: empty link list, probabilities
    /// outside `[0, 1)` (a link that always fails would never drain), zero
    /// batch size, or a field exponent outside `[1, 16]`.
    pub fn validate(self) -> Result<Self> {
        if self.erasure_probs.is_empty() {
            return Err(Error::NoLinks);
        }
        for (i, &p) in self.erasure_probs.iter().enumerate() {
            if !(0.0..1.0).contains(&p) {
                return Err(Error::ErasureProbOutOfRange { index: i, value: p });
            }
        }
        if self.batch_size == 0 {
            return Err(Error::ZeroBatchSize);
        }
        if !(1..=16).contains(&self.field_exponent) {
            return Err(Error::FieldExponentOutOfRange {
                value: self.field_exponent,
            });
        }
        Ok(self)
    }

    /// The link with maximal erasure probability.
    ///
    /// Ties report the smallest index with `unique = false`; callers that
    /// need a unique worst link (the delay bound does) must check the flag.
    pub fn worst_link(&self) -> WorstLink {
        let mut index = 0;
        let mut prob = self.erasure_probs[0];
        for (i, &p) in self.erasure_probs.iter().enumerate().skip(1) {
            if p > prob {
                prob = p;
                index = i;
            }
        }
        let unique = self
            .erasure_probs
            .iter()
            .filter(|&&p| p == prob)
            .count()
            == 1;
        WorstLink {
            index: index + 1,
            prob,
            unique,
        }
    }

    /// Copy of the config with the worst link swapped into first position
    /// (departure-process distribution is unaffected by the swap).
    pub fn worst_link_first(&self) -> Self {
        let w = self.worst_link();
        let mut probs = self.erasure_probs.clone();
        probs.swap(0, w.index - 1);
        NetworkConfig {
            erasure_probs: probs,
            ..self.clone()
        }
    }

    /// Capacity term `n / (1 - p_m)`: the slots the worst link alone needs.
    pub fn capacity_term(&self) -> f64 {
        self.batch_size as f64 / (1.0 - self.worst_link().prob)
    }
}

/// The worst (most lossy) link of a network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorstLink {
    /// 1-based position of the (first) maximal link.
    pub index: usize,
    /// Its erasure probability `p_m`.
    pub prob: f64,
    /// True iff exactly one link attains the maximum.
    pub unique: bool,
}

/// Tandem-queue state: `diffs[i]` counts the innovative packets the node
/// before link `i` holds relative to the node after it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QueueState {
    pub diffs: Vec<u64>,
}

impl QueueState {
    /// Initial state: the whole batch sits at the source.
    pub fn initial(batch_size: u64, links: usize) -> Self {
        let mut diffs = vec![0; links];
        diffs[0] = batch_size;
        QueueState { diffs }
    }

    pub fn new(diffs: Vec<u64>) -> Self {
        QueueState { diffs }
    }

    /// Packets still in flight (not yet at the destination).
    pub fn in_flight(&self) -> u64 {
        self.diffs.iter().sum()
    }

    /// One synchronous slot: every link with a packet queued and an up
    /// channel moves one unit, all decisions taken on pre-slot counts. A
    /// unit leaving the last link reaches the destination; the number of
    /// such deliveries (0 or 1 for a line) is returned.
    ///
    /// A unit arriving at a node this slot is eligible for forwarding only
    /// from the next slot on.
    pub fn step(&mut self, link_up: &[bool]) -> u64 {
        debug_assert_eq!(link_up.len(), self.diffs.len());
        let last = self.diffs.len() - 1;
        let mut delivered = 0;
        let mut carry_in = 0;
        for i in 0..=last {
            let moves = self.diffs[i] >= 1 && link_up[i];
            self.diffs[i] += carry_in;
            if moves {
                self.diffs[i] -= 1;
                if i == last {
                    delivered += 1;
                } else {
                    carry_in = 1;
                    continue;
                }
            }
            carry_in = 0;
        }
        delivered
    }
}
