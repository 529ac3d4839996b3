use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use linedelay_cli::configfile::{self, Overrides, Settings};
use linedelay_cli::output::Format;
use linedelay_cli::{commands, verify};

/// Batch-delay simulation and exact analysis for erasure line networks.
///
/// A batch of n coded packets crosses a chain of lossy links; every
/// command reports on the slots that takes. Defaults describe a two-hop
/// network with erasure probabilities 0.5 and 0.3 and a 50-packet batch.
#[derive(Parser)]
#[command(name = "linedelay", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// Comma-separated link erasure probabilities, e.g. 0.5,0.3
    #[arg(long)]
    links: Option<String>,
    /// Batch size (packets)
    #[arg(long)]
    n: Option<u64>,
    /// Monte Carlo trial count
    #[arg(long)]
    trials: Option<u64>,
    /// Master seed (default: $LINEDELAY_SEED or a fixed constant)
    #[arg(long)]
    seed: Option<u64>,
    /// Field exponent q for the packet-level simulator (GF(2^q))
    #[arg(long = "field-exponent")]
    field_exponent: Option<u32>,
    /// Deviation exponent for concentration bounds, in (0, 0.5)
    #[arg(long)]
    delta: Option<f64>,
    /// Slot index for rank-concentration checks
    #[arg(long)]
    t: Option<u64>,
    /// Inclusive batch-size range a:b for convergence sweeps
    #[arg(long = "n-range")]
    n_range: Option<String>,
    /// key=value settings file; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output format for data files
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

impl CommonOpts {
    fn settings(&self) -> Result<Settings> {
        let flags = Overrides {
            links: self
                .links
                .as_deref()
                .map(configfile::parse_links)
                .transpose()?,
            n: self.n,
            trials: self.trials,
            seed: self.seed,
            field_exponent: self.field_exponent,
            delta: self.delta,
            t: self.t,
            n_range: self
                .n_range
                .as_deref()
                .map(configfile::parse_n_range)
                .transpose()?,
        };
        configfile::resolve(flags, self.config.as_deref())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo estimate of the expected batch transfer time
    Simulate(CommonOpts),
    /// Exact expectations from the absorbing chain
    Exact(CommonOpts),
    /// Capacity term, delay-function bound, and steady-state tail
    Bounds(CommonOpts),
    /// Transfer-time distribution (Monte Carlo plus exact when in range)
    Pmf(CommonOpts),
    /// Delay function versus batch size, with its constant bound
    Convergence(CommonOpts),
    /// Concentration bounds with empirical verification
    Concentration(CommonOpts),
    /// Queue-level versus packet-level simulation under common erasures
    Compare(CommonOpts),
    /// Run every module invariant and exit nonzero on failure
    Verify(CommonOpts),
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Simulate(o) => commands::cmd_simulate(&o.settings()?, o.format, o.out.as_deref())?,
        Command::Exact(o) => commands::cmd_exact(&o.settings()?, o.format, o.out.as_deref())?,
        Command::Bounds(o) => commands::cmd_bounds(&o.settings()?, o.format, o.out.as_deref())?,
        Command::Pmf(o) => commands::cmd_pmf(&o.settings()?, o.format, o.out.as_deref())?,
        Command::Convergence(o) => {
            commands::cmd_convergence(&o.settings()?, o.format, o.out.as_deref())?
        }
        Command::Concentration(o) => {
            commands::cmd_concentration(&o.settings()?, o.format, o.out.as_deref())?
        }
        Command::Compare(o) => commands::cmd_compare(&o.settings()?, o.format, o.out.as_deref())?,
        Command::Verify(o) => {
            let settings = o.settings()?;
            let (checks, ok) = verify::run_all(&settings);
            verify::print_report(&checks);
            return Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE });
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
