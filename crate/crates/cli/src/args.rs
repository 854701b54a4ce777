use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "fdside", version, about = "Rate regions, outer bounds, capacity gaps and multiplexing gains for side-channel assisted full-duplex links")]
pub struct Cli {
    /// Output format (default: csv for sweep, json otherwise)
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write output here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Master seed for randomized suites
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// JSON file whose keys mirror the long flags; flags on the command line win
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rate region of one scheme or outer bound
    Region(RegionArgs),
    /// Multiplexing gains along a grid of interference exponents
    Sweep(SweepArgs),
    /// Randomized search for the largest capacity gaps
    Gap(GapArgs),
    /// Multiplexing gains per scheme
    Mgain(MgainArgs),
    /// Run the randomized property suites
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegionScheme {
    Bc,
    Cc,
    Dc,
    Ec,
    Z,
    OuterNointerf,
    OuterGenie,
    OuterEnvelope,
}

#[derive(Debug, Clone, Args)]
pub struct ChannelArgs {
    #[arg(long, conflicts_with_all = ["snr1_db", "snr_db"])]
    pub snr1: Option<f64>,
    #[arg(long, conflicts_with = "snr_db")]
    pub snr1_db: Option<f64>,
    #[arg(long, conflicts_with_all = ["snr2_db", "snr_db"])]
    pub snr2: Option<f64>,
    #[arg(long, conflicts_with = "snr_db")]
    pub snr2_db: Option<f64>,
    #[arg(long, conflicts_with_all = ["inr_db", "snr_db"])]
    pub inr: Option<f64>,
    #[arg(long, conflicts_with = "snr_db")]
    pub inr_db: Option<f64>,
    /// Side-channel SNR at full power (default 0)
    #[arg(long, conflicts_with_all = ["snr_side_db", "snr_db"])]
    pub snr_side: Option<f64>,
    #[arg(long, conflicts_with = "snr_db")]
    pub snr_side_db: Option<f64>,
    /// Common SNR in dB; with --mu and --nu sets inr = snr^mu, snr_side = snr^nu
    #[arg(long)]
    pub snr_db: Option<f64>,
    #[arg(long, requires = "snr_db")]
    pub mu: Option<f64>,
    #[arg(long, requires = "snr_db")]
    pub nu: Option<f64>,
    /// Side-channel to main-channel bandwidth ratio (default 0)
    #[arg(long)]
    pub w: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct RegionArgs {
    #[arg(long, value_enum)]
    pub scheme: RegionScheme,
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Fraction of M1's power on the side-channel
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Fraction of the main-channel power on the private message
    #[arg(long)]
    pub beta: Option<f64>,
    /// Estimate-and-cancel scaling factor
    #[arg(long)]
    pub k: Option<f64>,
    /// Optimize the split for the sum rate and emit the frontier over splits
    #[arg(long, conflicts_with_all = ["lambda", "beta", "k"])]
    pub optimize: bool,
    /// Grid spacing for frontiers and envelopes
    #[arg(long, default_value_t = 0.01)]
    pub resolution: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub snr_db: f64,
    #[arg(long)]
    pub w: f64,
    /// `eq-mu` or a fixed side-channel exponent
    #[arg(long, default_value = "eq-mu")]
    pub nu: String,
    /// Interference exponents as start:end:step
    #[arg(long, default_value = "0:2:0.01")]
    pub mu: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GapScheme {
    Bc,
    Dc,
    Ec,
}

#[derive(Debug, Clone, Args)]
pub struct GapArgs {
    #[arg(long, value_enum)]
    pub scheme: GapScheme,
    /// Number of random draws (default 10000 for bc, 1000 otherwise)
    #[arg(long)]
    pub draws: Option<usize>,
    /// Fix the bandwidth ratio instead of drawing it
    #[arg(long)]
    pub w: Option<f64>,
    /// Draw only parameters meeting the scheme's gap hypotheses
    #[arg(long)]
    pub constrain_conditions: bool,
}

#[derive(Debug, Clone, Args)]
pub struct MgainArgs {
    /// High-SNR limits
    #[arg(long)]
    pub asymptotic: bool,
    /// Gains at --snr-db with optimized splits
    #[arg(long)]
    pub finite: bool,
    #[arg(long)]
    pub mu: f64,
    #[arg(long)]
    pub nu: f64,
    #[arg(long)]
    pub w: f64,
    #[arg(long)]
    pub snr_db: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Suite to run (repeatable; `all` adds the opt-in suites)
    #[arg(long)]
    pub suite: Vec<String>,
    /// Override the per-suite draw count
    #[arg(long)]
    pub draws: Option<usize>,
    /// Inflate the BC region by 0.01 bit to check that containment fails
    #[arg(long)]
    pub perturb: bool,
}
