//! Batch-delay analysis for coded transmission over line networks of
//! erasure links.
//!
//! A source pushes a batch of `n` coded packets across a chain of
//! unreliable links toward a destination; each link independently drops
//! its packet per slot with a fixed probability. This crate computes the
//! block transfer time `T_n` three independent ways:
//!
//! * [`queue`] — Monte Carlo over the innovative-packet abstraction, where
//!   the network reduces to a tandem queue of per-link rank differences;
//! * [`rlnc`] — packet-level Monte Carlo over GF(2^q) with genuine random
//!   linear recoding at every node, for quantifying the finite-field gap;
//! * [`markov`] — exact expectations and distributions from the absorbing
//!   Markov chain of the queue abstraction.
//!
//! [`analysis`] adds the closed-form bounds tying these together: the
//! capacity decomposition of the expected delay, its n-independent upper
//! bound, the steady-state tail delay, and martingale concentration
//! estimates for both `T_n` and the destination rank process.
//!
//! The crate is `no_std` (alloc required) and fully deterministic: all
//! randomness derives from explicit `(seed, trial, link)` keys, so results
//! are bit-identical across runs, platforms, and trial execution orders.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod analysis;
pub mod error;
pub mod gf;
pub mod markov;
pub mod model;
pub mod queue;
pub mod rlnc;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use model::{NetworkConfig, QueueState, WorstLink};
