//! Experiment runner around `linedelay-core`: option resolution,
//! trial-parallel drivers, deterministic CSV/JSON output, and the
//! invariant suite behind the `verify` subcommand.

pub mod commands;
pub mod configfile;
pub mod output;
pub mod par;
pub mod verify;
