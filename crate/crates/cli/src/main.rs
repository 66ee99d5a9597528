//! `bplt`: rate functions, BP fixed points and exact checks from the command
//! line.

mod commands;
mod config;
mod error;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::Settings;
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "bplt", version, about = "Lower-tail rate functions via belief propagation")]
#[command(allow_negative_numbers = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON file with parameters; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Print the summary block as a JSON object.
    #[arg(long, global = true)]
    json: bool,

    /// Seed for every random choice (default 0).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Where to write the CSV artifact.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Evaluate over `lo:hi:steps` evenly spaced points of the main parameter.
    #[arg(long, global = true)]
    sweep: Option<String>,

    /// Lift the size guards on exact enumeration and tree building.
    #[arg(long, global = true)]
    unsafe_size: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form rate for p = c Delta^(-1/(k-1)) on regular tree-like hypergraphs.
    RateGnp(RateGnpArgs),
    /// Closed-form rate at a fixed number of elements m = b Delta^(-1/(k-1)) N.
    RateGnm(RateGnmArgs),
    /// Lower-tail rate for copies of a strictly 2-balanced graph H.
    RateSubgraph(RateSubgraphArgs),
    /// Rate of having no k-term arithmetic progression.
    RateKap(RateKapArgs),
    /// The limiting marginal profile x*_{k,c} on a grid, as CSV `t,x_star`.
    KapProfile(KapProfileArgs),
    /// BP fixed point, Bethe free energy and (with --eta) the BP rate of a hypergraph file.
    BpSolve(BpSolveArgs),
    /// Exact partition function, marginals and identity residuals.
    ExactCheck(ExactCheckArgs),
    /// Monte Carlo lower-tail estimate.
    McEstimate(McEstimateArgs),
    /// Weitz hypertree recursion against exact marginals.
    WeitzVerify(WeitzVerifyArgs),
}

#[derive(Debug, Args)]
pub struct RateGnpArgs {
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RateGnmArgs {
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RateSubgraphArgs {
    /// Library name (K3, C4, K2,3, paw, diamond, petersen, ...) or an edge-list file.
    #[arg(long)]
    pub graph: Option<String>,
    /// gnp or gnm.
    #[arg(long)]
    pub model: Option<String>,
    /// c for gnp, b for gnm.
    #[arg(long, alias = "c", alias = "b")]
    pub param: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    /// Also report Delta_H and the edge probability (or count) at this n.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RateKapArgs {
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub c: Option<f64>,
    /// bethe, integral or both.
    #[arg(long)]
    pub method: Option<String>,
    /// Gauss-Legendre nodes for the integral form.
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub grid: Option<usize>,
}

#[derive(Debug, Args)]
pub struct KapProfileArgs {
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BpSolveArgs {
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Edge size; inferred when the file is uniform.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub zeta: Option<f64>,
    /// Degree scale (default: maximum degree).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Solve for zeta at this eta and report the BP rate.
    #[arg(long)]
    pub eta: Option<f64>,
    /// general or near-regular.
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Gauss-Legendre nodes for the integral form of log Z.
    #[arg(long)]
    pub nodes: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ExactCheckArgs {
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub zeta: Option<f64>,
    /// Check this vertex only (default: all).
    #[arg(long)]
    pub vertex: Option<usize>,
    /// Check this edge id only (default: all).
    #[arg(long)]
    pub edge: Option<usize>,
}

#[derive(Debug, Args)]
pub struct McEstimateArgs {
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Args)]
pub struct WeitzVerifyArgs {
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub zeta: Option<f64>,
    /// Root vertex (default: every vertex).
    #[arg(long)]
    pub vertex: Option<usize>,
    /// Extra random vertex/edge orders to try per root.
    #[arg(long)]
    pub shuffles: Option<usize>,
    /// Write the text dump of the first root's tree here.
    #[arg(long)]
    pub dump: Option<PathBuf>,
}

/// Everything a command needs besides its own flags.
pub struct Context {
    pub settings: Settings,
    pub json: bool,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub sweep: Option<Sweep>,
    pub unsafe_size: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Sweep {
    pub fn parse(s: &str) -> CliResult<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || CliError::validation(format!("--sweep expects lo:hi:steps, got {s:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let steps: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if steps == 0 || !lo.is_finite() || !hi.is_finite() {
            return Err(CliError::validation(format!("--sweep {s:?} gives an empty range")));
        }
        Ok(Self { lo, hi, steps })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.lo];
        }
        (0..self.steps)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::RateGnp(_) => "rate-gnp",
            Command::RateGnm(_) => "rate-gnm",
            Command::RateSubgraph(_) => "rate-subgraph",
            Command::RateKap(_) => "rate-kap",
            Command::KapProfile(_) => "kap-profile",
            Command::BpSolve(_) => "bp-solve",
            Command::ExactCheck(_) => "exact-check",
            Command::McEstimate(_) => "mc-estimate",
            Command::WeitzVerify(_) => "weitz-verify",
        }
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("BPLT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::validation(format!("BPLT_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::validation(e.to_string()))
}

fn run(cli: Cli) -> CliResult<String> {
    configure_threads()?;
    let name = cli.command.name();
    let settings = Settings::load(cli.config.as_deref(), name)?;
    let sweep = match settings.get(cli.sweep, "sweep")? {
        Some(s) => Some(Sweep::parse(&s)?),
        None => None,
    };
    let ctx = Context {
        json: settings.flag(cli.json, "json")?,
        seed: settings.or(cli.seed, "seed", 0)?,
        output: settings.path(cli.output, "output")?,
        unsafe_size: settings.flag(cli.unsafe_size, "unsafe_size")?,
        sweep,
        settings,
    };
    match cli.command {
        Command::RateGnp(a) => commands::rate_gnp(&ctx, a),
        Command::RateGnm(a) => commands::rate_gnm(&ctx, a),
        Command::RateSubgraph(a) => commands::rate_subgraph(&ctx, a),
        Command::RateKap(a) => commands::rate_kap(&ctx, a),
        Command::KapProfile(a) => commands::kap_profile(&ctx, a),
        Command::BpSolve(a) => commands::bp_solve(&ctx, a),
        Command::ExactCheck(a) => commands::exact_check(&ctx, a),
        Command::McEstimate(a) => commands::mc_estimate(&ctx, a),
        Command::WeitzVerify(a) => commands::weitz_verify(&ctx, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
