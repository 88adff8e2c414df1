//! `grover` — simulate generalized amplitude-amplification searches,
//! sweep and invert the closed-form success model, and reproduce a
//! six-condition recognition experiment from fitted phases.

mod commands;
mod output;

use std::path::PathBuf;
use std::process;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "grover",
    version,
    about = "Search simulator and recall-model workbench",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one search and list the marked-item probability per iteration
    Simulate(SimulateArgs),
    /// Evaluate success probability over a grid of phases
    Sweep(SweepArgs),
    /// Find every phase that reproduces an observed success rate
    Fit(FitArgs),
    /// Fit all six cells of an experiment table under ordering constraints
    Table(TableArgs),
    /// Draw synthetic Bernoulli participants at the fitted phases
    Experiment(ExperimentArgs),
}

/// Where probabilities come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    /// Dense state-vector simulation (any n >= 2)
    Statevector,
    /// Closed form with the per-step angle scaled by sin(phi/2)
    Eq3,
    /// Closed form with the whole rotation count scaled by sin(phi/2)
    Appendix,
}

impl Engine {
    pub fn label(&self) -> &'static str {
        match self {
            Engine::Statevector => "statevector",
            Engine::Eq3 => "eq3",
            Engine::Appendix => "appendix",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Number of items in the search space
    #[arg(long)]
    pub n: usize,
    /// Iteration count
    #[arg(long)]
    pub j: u32,
    /// Diffusion phase in radians, strictly inside (0, 2*pi)
    #[arg(long)]
    pub phi: f64,
    /// Oracle angle override (statevector engine only; defaults to phi)
    #[arg(long)]
    pub theta: Option<f64>,
    /// Marked item index (statevector engine only; defaults to 0)
    #[arg(long)]
    pub marked: Option<usize>,
    /// Probability source
    #[arg(long, value_enum, default_value_t = Engine::Statevector)]
    pub engine: Engine,
    /// Build the diffusion from the explicit transform circuit (needs n = 2^k)
    #[arg(long)]
    pub explicit_circuit: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

// The default grid ends on the two-decimal point 6.28, not at 2*pi.
#[allow(clippy::approx_constant)]
const DEFAULT_PHI_END: f64 = 6.28;

#[derive(Args)]
pub struct SweepArgs {
    /// Number of items in the search space
    #[arg(long, default_value_t = 80)]
    pub n: usize,
    /// Iteration counts, comma separated
    #[arg(long, value_delimiter = ',', default_values_t = vec![3, 7, 12])]
    pub j: Vec<u32>,
    /// First grid phase
    #[arg(long, default_value_t = 0.01)]
    pub phi_start: f64,
    /// Last grid phase (inclusive when hit by the step)
    #[arg(long, default_value_t = DEFAULT_PHI_END)]
    pub phi_end: f64,
    /// Grid spacing
    #[arg(long, default_value_t = 0.01)]
    pub phi_step: f64,
    /// Probability source
    #[arg(long, value_enum, default_value_t = Engine::Eq3)]
    pub engine: Engine,
    /// Marked item index (statevector engine only; defaults to 0)
    #[arg(long)]
    pub marked: Option<usize>,
    /// Build the diffusion from the explicit transform circuit (needs n = 2^k)
    #[arg(long)]
    pub explicit_circuit: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args)]
pub struct FitArgs {
    /// Observed success probability to invert
    #[arg(long)]
    pub p: f64,
    /// Number of items in the search space
    #[arg(long)]
    pub n: usize,
    /// Iteration count the observation was made at
    #[arg(long)]
    pub j: u32,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args)]
pub struct TableArgs {
    /// Experiment fixture file (defaults to the built-in data set)
    #[arg(long)]
    pub fixture: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args)]
pub struct ExperimentArgs {
    /// Seed for the per-cell trial generators
    #[arg(long)]
    pub seed: u64,
    /// Trials for every cell (defaults to 9 per participant)
    #[arg(long)]
    pub trials_per_cell: Option<u64>,
    /// Experiment fixture file (defaults to the built-in data set)
    #[arg(long)]
    pub fixture: Option<PathBuf>,
    /// Reserved: also rerun the verbal-material conditions
    #[arg(long)]
    pub include_verbal: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => commands::simulate(args),
        Command::Sweep(args) => commands::sweep(args),
        Command::Fit(args) => commands::fit(args),
        Command::Table(args) => commands::table(args),
        Command::Experiment(args) => commands::experiment(args),
    };
    match result {
        Ok(out) => {
            print!("{}", out.stdout);
            process::exit(out.exit_code);
        }
        Err(e) => {
            eprintln!("error: {e}");
            process::exit(e.exit_code());
        }
    }
}
