//! Command-line front end.

mod demo;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{
    enumerate_optimal, lemma1_config, lemma2_config, verify_clique_partition, ExactOptions,
    ExactStatus, GraphFile, WifiGraph, DEFAULT_MAX_N,
};
use crate::heuristic::{configure_network, HeuristicOptions};
use crate::metrics::{all_node_metrics, NodeMetrics};
use crate::ratemodel::{
    allocate_rates, baseline_rates, check_feasibility, Assignment, ConfigurationFile, Network,
};
use crate::scenario::{generate_scenario, Scenario, ScenarioParams};
use crate::sweep::{run_sweep, write_sweep, SweepGrid};

pub use demo::run_demo;

#[derive(Debug, Parser)]
#[command(name = "tethernet", version, about = "Hotspot configuration of tethered cellular nodes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a random cell and write it as a scenario file.
    Generate(GenerateArgs),
    /// Configure a network and write assignment, rates and per-node metrics.
    Solve(SolveArgs),
    /// Check a configuration against a network.
    Audit(AuditArgs),
    /// Run a Monte-Carlo grid and write CSV summaries.
    Sweep(SweepArgs),
    /// Replay a built-in reference network.
    Demo {
        /// One of intro-3node, fig2a, fig2b, fig2c, fig2d, fig2e, fig4.
        name: String,
    },
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    /// Cellular pathloss exponent.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// WiFi pathloss exponent.
    #[arg(long)]
    pub alpha_wifi: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 100)]
    pub nodes: usize,
    #[arg(long, default_value_t = 1.0)]
    pub radius_km: f64,
    #[arg(long, default_value_t = 0.75)]
    pub eta: f64,
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Exact,
    Heuristic,
    Lemma1,
    Lemma2,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Scenario file, or a WiFi graph file (`n`, `edges`, `cell_sinr_db`).
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Solver::Heuristic)]
    pub solver: Solver,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MAX_N)]
    pub max_exact_n: usize,
    /// Keep the hotspot network as selected, without client rebalancing.
    #[arg(long)]
    pub no_fair_loading: bool,
    /// Write a JSON-lines trace of the heuristic search to this file.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Configuration as written by `solve`.
    #[arg(long)]
    pub solution: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [100, 200, 400])]
    pub nodes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0, 5.0])]
    pub radius_km: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 0.75, 1.0])]
    pub eta: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [3.0])]
    pub alpha: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [2.5, 3.0])]
    pub alpha_wifi: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    pub instances: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub no_fair_loading: bool,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

/// Either input layout accepted by `solve` and `audit`.
pub enum Input {
    Scenario(Scenario),
    Graph(GraphFile),
}

impl Input {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let format = |e: serde_json::Error| Error::Format {
            path: path.to_path_buf(),
            reason: e.to_string(),
        };
        let value: serde_json::Value = serde_json::from_str(&text).map_err(format)?;
        if value.get("edges").is_some() {
            Ok(Input::Graph(serde_json::from_value(value).map_err(format)?))
        } else {
            Ok(Input::Scenario(Scenario::from_file(
                serde_json::from_value(value).map_err(format)?,
            )?))
        }
    }

    pub fn network(&self) -> Result<Network> {
        match self {
            Input::Scenario(s) => Ok(Network::from_scenario(s)),
            Input::Graph(g) => g.network(),
        }
    }

    fn graph(&self, solver: &str) -> Result<WifiGraph> {
        match self {
            Input::Graph(g) => WifiGraph::new(g.n, &g.edges),
            Input::Scenario(_) => Err(Error::param(
                "solver",
                format!("{solver} needs a WiFi graph input"),
            )),
        }
    }
}

/// What `solve` writes.
#[derive(Debug, Clone, Serialize)]
pub struct Solution {
    pub solver: Solver,
    #[serde(flatten)]
    pub configuration: ConfigurationFile,
    pub sum_rate: f64,
    pub hotspot_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_status: Option<ExactStatus>,
    pub metrics: Vec<NodeMetrics>,
}

fn channel_params(base: ScenarioParams, channel: &ChannelArgs) -> ScenarioParams {
    ScenarioParams {
        cell_pathloss_exponent: channel.alpha.unwrap_or(base.cell_pathloss_exponent),
        wifi_pathloss_exponent: channel.alpha_wifi.unwrap_or(base.wifi_pathloss_exponent),
        ..base
    }
}

fn generate(args: &GenerateArgs, out: &mut dyn Write) -> Result<()> {
    let params = channel_params(
        ScenarioParams {
            node_count: args.nodes,
            cell_radius_m: args.radius_km * 1000.0,
            wifi_efficiency: args.eta,
            rng_seed: args.seed,
            ..ScenarioParams::default()
        },
        &args.channel,
    );
    let scenario = generate_scenario(&params)?;
    scenario.save(&args.out)?;
    writeln!(out, "wrote {} nodes to {}", args.nodes, args.out.display())
        .map_err(|e| Error::io("<stdout>", e))
}

pub fn solve(input: &Input, args: &SolveArgs) -> Result<(Solution, Option<Vec<u8>>)> {
    let net = input.network()?;
    let mut trace = None;
    let mut exact_status = None;
    let assignment: Assignment = match args.solver {
        Solver::Exact => {
            let r = enumerate_optimal(
                &net,
                &ExactOptions {
                    max_n: args.max_exact_n,
                    ..ExactOptions::default()
                },
            )?;
            exact_status = Some(r.status);
            r.best_assignment
        }
        Solver::Heuristic => {
            let cfg = configure_network(
                &net,
                &HeuristicOptions {
                    fair_loading: !args.no_fair_loading,
                    trace_selection: args.trace.is_some(),
                    ..HeuristicOptions::default()
                },
            );
            if args.trace.is_some() {
                let mut buf = Vec::new();
                cfg.write_trace(&mut buf).expect("writing to memory");
                trace = Some(buf);
            }
            cfg.assignment
        }
        Solver::Lemma1 => lemma1_config(&input.graph("lemma1")?, net.cell_sinrs())?,
        Solver::Lemma2 => {
            let graph = input.graph("lemma2")?;
            let parts = verify_clique_partition(&graph)
                .ok_or_else(|| Error::Structure("WiFi graph is not a union of cliques".into()))?;
            lemma2_config(&graph, &parts, net.cell_sinrs())?
        }
    };
    let allocation = allocate_rates(&net, &assignment)?;
    let baselines = baseline_rates(&net);
    Ok((
        Solution {
            solver: args.solver,
            configuration: ConfigurationFile::new(&assignment, Some(&allocation)),
            sum_rate: allocation.total(),
            hotspot_count: assignment.hotspot_count(),
            exact_status,
            metrics: all_node_metrics(&net, &assignment, &allocation, &baselines),
        },
        trace,
    ))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

// Extra fields such as `metrics` are ignored; only the configuration is audited.
fn read_solution(path: &Path) -> Result<ConfigurationFile> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

fn audit(args: &AuditArgs, out: &mut dyn Write) -> Result<()> {
    let net = Input::load(&args.input)?.network()?;
    let solution = read_solution(&args.solution)?;
    let assignment = solution.assignment(net.node_count())?;
    let allocation = solution.allocation(&assignment);
    let report = check_feasibility(&net, &assignment, &allocation);
    write!(out, "{report}").map_err(|e| Error::io("<stdout>", e))?;
    if report.feasible {
        Ok(())
    } else {
        Err(Error::Infeasible(Box::new(report)))
    }
}

fn sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let grid = SweepGrid {
        nodes: args.nodes.clone(),
        radius_km: args.radius_km.clone(),
        eta: args.eta.clone(),
        alpha: args.alpha.clone(),
        alpha_wifi: args.alpha_wifi.clone(),
        instances: args.instances,
        base_seed: args.seed,
        heuristic: HeuristicOptions {
            fair_loading: !args.no_fair_loading,
            ..HeuristicOptions::default()
        },
        ..SweepGrid::default()
    };
    let cells = run_sweep(&grid)?;
    write_sweep(&args.out, &cells)?;
    for c in &cells {
        writeln!(
            out,
            "{}: mean gain {:.2}%, median gain {:.2}%, mean H* {:.2}",
            c.key.stem(),
            c.summary.mean_gain_pct,
            c.summary.median_gain_pct,
            c.summary.mean_hotspot_count
        )
        .map_err(|e| Error::io("<stdout>", e))?;
    }
    Ok(())
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Generate(args) => generate(args, out),
        Command::Solve(args) => {
            let input = Input::load(&args.input)?;
            let (solution, trace) = solve(&input, args)?;
            let text = serde_json::to_vec_pretty(&solution).expect("solution serializes");
            write_file(&args.out, &text)?;
            if let (Some(path), Some(trace)) = (&args.trace, trace) {
                write_file(path, &trace)?;
            }
            writeln!(
                out,
                "{} hotspots, sum rate {:.4}; wrote {}",
                solution.hotspot_count,
                solution.sum_rate,
                args.out.display()
            )
            .map_err(|e| Error::io("<stdout>", e))
        }
        Command::Audit(args) => audit(args, out),
        Command::Sweep(args) => sweep(args, out),
        Command::Demo { name } => run_demo(name, out),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit status. Errors go to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
