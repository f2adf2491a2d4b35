//! `replibound`: tail bounds, stability checks and simulations of replicated
//! parallel queueing systems from the command line.

mod commands;
mod config;
mod figures;
mod model;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

const DIST_HELP: &str = "Distribution grammar: exp:rate=R | pareto:alpha=A | \
weibull:scale=S,shape=A | uniform | erlang:n=N,rate=R | hyperexp:p=P1,P2,..;mu=M1,M2,.. | \
det:value=C. Arrival streams additionally accept mmpp:p=P,lact=LA,liact=LI.";

/// Bad flags, values or config entries (exit code 2).
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Parser)]
#[command(name = "replibound", version, about, after_help = DIST_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decay rate and prefactor of the response-time tail bound.
    Bound(BoundArgs),
    /// Simulate a system and write its response-time summary and CCDF.
    Simulate(SimulateArgs),
    /// Regenerate the data behind one of the reference figures.
    Figure(FigureArgs),
    /// Utilization per replication factor and the best factor.
    Stability(StabilityArgs),
    /// Fit a hyperexponential to a Pareto tail.
    Fit(FitArgs),
}

/// System description shared by the commands. Every flag can also be given
/// in a `--config` file under the key shown in brackets.
#[derive(Args, Debug, Clone, Default)]
pub struct ModelArgs {
    /// Number of servers [K]
    #[arg(long = "K")]
    pub servers: Option<usize>,
    /// Replication factor, must divide K [k]
    #[arg(long = "k")]
    pub replicas: Option<usize>,
    /// Task service distribution [service]
    #[arg(long)]
    pub service: Option<String>,
    /// Exponential service rate, shorthand for --service exp:rate=MU [service.rate]
    #[arg(long)]
    pub mu: Option<f64>,
    /// Interarrival distribution or mmpp:... chain [arrivals]
    #[arg(long)]
    pub arrivals: Option<String>,
    /// Poisson arrival rate, shorthand for --arrivals exp:rate=LAMBDA [arrivals.rate]
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Switching probability of the two-state arrival chain [arrivals.p]
    #[arg(long)]
    pub p: Option<f64>,
    /// Arrival rate in the active state [arrivals.lact]
    #[arg(long)]
    pub lact: Option<f64>,
    /// Arrival rate in the inactive state [arrivals.liact]
    #[arg(long)]
    pub liact: Option<f64>,
    /// Correlation degree: replicas are delta*shared + (1-delta)*service [delta]
    #[arg(long)]
    pub delta: Option<f64>,
    /// Shared component distribution, defaults to the service law [shared]
    #[arg(long)]
    pub shared: Option<String>,
    /// key=value file with defaults for any flag
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// ind, mkv, cor, mkv_cor, fj, fjr or deferred [regime]
    #[arg(long)]
    pub regime: Option<String>,
    /// Replication offset of the deferred model [offset]
    #[arg(long)]
    pub offset: Option<f64>,
    /// Tail probability of the reported quantile [epsilon]
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Output CSV for the bound row (stdout when omitted) [out]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the (sigma, bound) curve to this CSV [curve]
    #[arg(long)]
    pub curve: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Replicated,
    Random,
    RoundRobin,
    CentralQueue,
    ForkJoin,
    Fjr,
    Deferred,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Dispatch policy [policy]
    #[arg(long, value_enum)]
    pub policy: Option<PolicyArg>,
    /// Replication offset of the deferred policy [offset]
    #[arg(long)]
    pub offset: Option<f64>,
    /// Let sibling replicas run to completion [non_purging]
    #[arg(long)]
    pub non_purging: bool,
    /// Jobs per run [jobs]
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Base seed; run i uses seed + i [seed]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Fraction of initial jobs discarded [warmup]
    #[arg(long)]
    pub warmup: Option<f64>,
    /// Independent runs [reps]
    #[arg(long)]
    pub reps: Option<usize>,
    /// Output prefix: writes PREFIX.summary.csv and PREFIX.ccdf.csv (summary to stdout when omitted) [out]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FigureName {
    Fig2,
    Fig3,
    Fig4a,
    Fig4b,
    Fig4c,
    Fig4d,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    /// Runs sized for a workstation (at most 1e7 jobs per curve)
    Desk,
    /// Ten times longer simulations
    Full,
}

#[derive(Args, Debug)]
pub struct FigureArgs {
    #[arg(value_enum)]
    pub name: FigureName,
    #[arg(long, value_enum, default_value = "desk")]
    pub scale: Scale,
    /// Output directory (default: $REPLIBOUND_OUT_DIR, else ./figures)
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Base seed; curve i uses seed + i
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    /// Pareto shape, > 1
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 8)]
    pub phases: usize,
    /// Lowest anchor point, >= 1
    #[arg(long, default_value_t = 1.0)]
    pub lo: f64,
    /// Highest anchor point
    #[arg(long, default_value_t = 1e4)]
    pub hi: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn exit_code(e: &anyhow::Error) -> u8 {
    use replibound_core::Error;
    if e.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match e.downcast_ref::<Error>() {
        Some(Error::InvalidParameter(_) | Error::Parse(_) | Error::WrongVariant(_)) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bound(a) => commands::bound(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Figure(a) => figures::run(&a),
        Command::Stability(a) => commands::stability(&a),
        Command::Fit(a) => commands::fit(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
