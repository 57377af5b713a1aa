use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polynotope_core::Flavor;

#[derive(Debug, Parser)]
#[command(name = "polynotope", version, about = "Mixed polynotope reachability, filtering and logic circuits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a reachability scenario and write its hull trace as CSV.
    Reach(ReachArgs),
    /// Run the Lotka-Volterra filter scenario and write its trace as CSV.
    Filter(ScenarioArgs),
    /// Build an n-bit ripple adder from nand gates.
    Adder(AdderArgs),
    /// Print the polynomial and truth table of every logic gate.
    Gates(GatesArgs),
    /// Write one state of a scenario as JSON, or re-read a JSON polynotope.
    Dump(DumpArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FlavorArg {
    Signed,
    Boolean,
}

impl From<FlavorArg> for Flavor {
    fn from(f: FlavorArg) -> Self {
        match f {
            FlavorArg::Signed => Flavor::Signed,
            FlavorArg::Boolean => Flavor::Boolean,
        }
    }
}

/// Options shared by the scenario subcommands.
#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Scenario configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for measurement noise and Monte-Carlo sampling.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of steps N.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Step size h.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Reduction order q.
    #[arg(long, visible_alias = "q")]
    pub order: Option<usize>,
    /// Encoding level g of the encoded initial states.
    #[arg(long)]
    pub level: Option<u32>,
    /// Check containment of sampled trajectories after the run.
    #[arg(long)]
    pub verify: bool,
    /// Number of Monte-Carlo samples for the containment check (implies --verify).
    #[arg(long)]
    pub mc: Option<usize>,
    /// Print the final monomial count and the wall-clock time.
    #[arg(long)]
    pub census: bool,
}

#[derive(Debug, Args)]
pub struct ReachArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Restrict the hulls to a cell: one sign string per state, comma
    /// separated, e.g. `+-+,--+` (an empty entry leaves that state free).
    #[arg(long)]
    pub cell: Option<String>,
}

#[derive(Debug, Args)]
pub struct AdderArgs {
    #[arg(long)]
    pub bits: usize,
    #[arg(long, value_enum, default_value = "signed")]
    pub flavor: FlavorArg,
    /// Print the monomial count and the wall-clock time.
    #[arg(long)]
    pub census: bool,
    /// Check the adder against integer addition on every input.
    #[arg(long)]
    pub verify: bool,
    /// Write the adder output polynotope as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GatesArgs {
    /// Restrict to one flavor; both when absent.
    #[arg(long, value_enum)]
    pub flavor: Option<FlavorArg>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DumpArgs {
    /// Scenario to run; the state at `--at` (default: last) is written.
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    pub config: Option<PathBuf>,
    /// Existing JSON polynotope to load, validate and write back.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Step index to dump.
    #[arg(long)]
    pub at: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, visible_alias = "q")]
    pub order: Option<usize>,
    #[arg(long)]
    pub level: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
}
