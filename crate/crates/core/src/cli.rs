//! The `conflink` commands. Each command writes its report to the given
//! writer so it can be driven from tests.

use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::load_config;
use crate::conformal::{conformal_link_predict, Adjustment, ConformalConfig};
use crate::error::{Error, Result};
use crate::graph::Pair;
use crate::harness::{aggregate, fdp, format_summary, run_experiment, tdp, write_csv};
use crate::io::{
    io_err, load_observed, read_covariates, read_pairs, read_truth, write_pairs, LoadOptions,
};
use crate::scoring::ScorerKind;

#[derive(Debug, Parser)]
#[command(
    name = "conflink",
    version,
    about = "Link prediction with false discovery rate control"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a Monte-Carlo experiment described by a config file.
    Simulate(SimulateArgs),
    /// Select hidden pairs of an observed graph at a target FDR.
    Predict(PredictArgs),
    /// Compare a selection with the ground truth.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub config: PathBuf,
    /// CSV path; overrides `output.csv` from the config.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Run replications on one thread.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Observed pairs: `i j` for true edges, `i j 0` for observed non-edges.
    pub edges: PathBuf,
    /// Unsampled pairs, one `i j` per line.
    pub mask: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    #[arg(long, default_value = "cn")]
    pub scorer: ScorerKind,
    #[arg(long, default_value_t = 5000)]
    pub cal_size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Use `α` as is instead of `α / π̂₀`.
    #[arg(long)]
    pub no_adjust: bool,
    #[arg(long)]
    pub directed: bool,
    /// Exclude `(i, i)` pairs from the pair universe.
    #[arg(long)]
    pub no_self_pairs: bool,
    /// Input files number nodes from 1.
    #[arg(long)]
    pub one_based: bool,
    /// Node count; inferred from the largest id when absent.
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub covariates: Option<PathBuf>,
    /// Where to write the selected pairs; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    pub selected: PathBuf,
    /// `i j s` per test pair, `s = 1` for true edges.
    pub truth: PathBuf,
    #[arg(long)]
    pub directed: bool,
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Simulate(args) => cmd_simulate(&args, out),
        Command::Predict(args) => cmd_predict(&args, out, err),
        Command::Evaluate(args) => cmd_evaluate(&args, out),
    }
}

fn report(path: &str) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: PathBuf::from(path),
        source,
    }
}

pub fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let run = load_config(&args.config)?;
    let records = run_experiment(&run.experiment, !args.sequential)?;
    // Nothing touches the filesystem until the whole experiment succeeded.
    if let Some(path) = args.output.as_ref().or(run.csv.as_ref()) {
        let mut csv = Vec::new();
        write_csv(&records, &mut csv).map_err(io_err(path))?;
        fs::write(path, csv).map_err(io_err(path))?;
    }
    out.write_all(format_summary(&aggregate(&records)).as_bytes())
        .map_err(report("<stdout>"))
}

pub fn cmd_predict(args: &PredictArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let options = LoadOptions {
        n: args.nodes,
        directed: args.directed,
        no_self_pairs: args.no_self_pairs,
        one_based: args.one_based,
    };
    let mut graph = load_observed(&args.edges, Some(&args.mask), &options)?;
    if let Some(path) = &args.covariates {
        let covariates = read_covariates(path, graph.n())?;
        graph = graph.with_covariates(covariates)?;
    }
    let config = ConformalConfig {
        alpha: args.alpha,
        cal_size: args.cal_size,
        adjustment: if args.no_adjust {
            Adjustment::None
        } else {
            Adjustment::Ratio
        },
    };
    let result = conformal_link_predict(&graph, &args.scorer, &config, args.seed)?;

    let mut selected = result.selected.clone();
    if args.one_based {
        for p in &mut selected {
            *p = Pair::new(p.i.index() + 1, p.j.index() + 1);
        }
    }
    let threshold = result
        .threshold
        .map_or_else(|| "none".to_string(), |t| t.to_string());
    let pi0 = result
        .pi0_hat
        .map_or_else(|| "none".to_string(), |p| p.to_string());
    let summary = format!(
        "selected: {}\nthreshold: {}\npi0_hat: {}\nalpha_used: {}\n",
        selected.len(),
        threshold,
        pi0,
        result.alpha_used
    );
    match &args.output {
        Some(path) => {
            let mut buf = Vec::new();
            write_pairs(&selected, &mut buf).map_err(io_err(path))?;
            fs::write(path, buf).map_err(io_err(path))?;
            out.write_all(summary.as_bytes())
                .map_err(report("<stdout>"))
        }
        None => {
            write_pairs(&selected, &mut *out).map_err(report("<stdout>"))?;
            err.write_all(summary.as_bytes())
                .map_err(report("<stderr>"))
        }
    }
}

pub fn cmd_evaluate(args: &EvaluateArgs, out: &mut dyn Write) -> Result<()> {
    let canonical = |p: Pair| if args.directed { p } else { p.ordered() };
    let truth = read_truth(&args.truth)?;
    let h0: Vec<Pair> = truth.h0.into_iter().map(canonical).collect();
    let h1: Vec<Pair> = truth.h1.into_iter().map(canonical).collect();
    let universe: HashSet<Pair> = h0.iter().chain(&h1).copied().collect();
    let mut selected: Vec<Pair> = read_pairs(&args.selected)?
        .into_iter()
        .map(canonical)
        .collect();
    selected.sort_unstable();
    selected.dedup();
    if let Some(&p) = selected.iter().find(|p| !universe.contains(p)) {
        return Err(Error::UnknownSelectedPair(p));
    }
    writeln!(
        out,
        "selected: {}\nfdp: {}\ntdp: {}",
        selected.len(),
        fdp(&selected, &h0),
        tdp(&selected, &h1)
    )
    .map_err(report("<stdout>"))
}
