//! Monte-Carlo evaluation of the selection procedures.
//!
//! Each replication draws (or resamples) one experiment, fits each method's
//! scorer once and evaluates every level of the α grid on the same scores.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::baselines::{CvtConfig, NaiveScores, ValidatedScores};
use crate::conformal::{Adjustment, CalibratedScores};
use crate::error::{Error, Result};
use crate::generator::{gen_sbm, make_experiment, ExperimentDesign, SbmParams};
use crate::graph::{partition_pairs, GroundTruth, ObservedGraph, Pair};
use crate::rng::{self, tag};
use crate::scoring::ScorerKind;

/// `|R ∩ H0| / (1 ∨ |R|)`.
pub fn fdp(selected: &[Pair], h0: &[Pair]) -> f64 {
    let h0: HashSet<&Pair> = h0.iter().collect();
    let false_hits = selected.iter().filter(|p| h0.contains(p)).count();
    false_hits as f64 / selected.len().max(1) as f64
}

/// `|R ∩ H1| / (1 ∨ |H1|)`.
pub fn tdp(selected: &[Pair], h1: &[Pair]) -> f64 {
    let selected: HashSet<&Pair> = selected.iter().collect();
    let hits = h1.iter().filter(|p| selected.contains(p)).count();
    hits as f64 / h1.len().max(1) as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Conformal,
    Naive,
    CrossValidated,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Conformal => "conformal",
            Method::Naive => "nt",
            Method::CrossValidated => "cvt",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "conformal" | "conf" => Ok(Method::Conformal),
            "nt" | "naive" => Ok(Method::Naive),
            "cvt" => Ok(Method::CrossValidated),
            other => Err(Error::param("methods", format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    pub method: Method,
    pub alpha: f64,
    pub replication: usize,
    pub fdp: f64,
    pub tdp: f64,
    pub n_selected: usize,
    pub seed: u64,
}

pub const CSV_HEADER: &str = "method,alpha,replication,fdp,tdp,n_selected,seed";

impl MetricsRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.method,
            self.alpha,
            self.replication,
            self.fdp,
            self.tdp,
            self.n_selected,
            self.seed
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    /// A fresh block-model graph per replication.
    Sbm {
        params: SbmParams,
        n: usize,
        directed: bool,
        self_pairs: bool,
    },
    /// A fixed, fully observed graph; replications resample the hidden pairs.
    Fixed(ObservedGraph),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub source: GraphSource,
    pub design: ExperimentDesign,
    pub scorer: ScorerKind,
    pub methods: Vec<Method>,
    pub alphas: Vec<f64>,
    pub replications: usize,
    pub master_seed: u64,
    pub adjustment: Adjustment,
    pub cvt: CvtConfig,
}

impl ExperimentConfig {
    /// The block-model study: 100 nodes, five classes, 10% of the edges
    /// hidden, `|H0| = |H1| / 2`, CN scores, all three methods.
    pub fn block_model_study() -> Self {
        ExperimentConfig {
            source: GraphSource::Sbm {
                params: SbmParams::five_class_hub(0.5, 0.05),
                n: 100,
                directed: false,
                self_pairs: true,
            },
            design: ExperimentDesign {
                pi_mis: 0.1,
                ratio_h0_h1: 0.5,
                cal_size: 5000,
            },
            scorer: ScorerKind::CN,
            methods: vec![Method::Conformal, Method::Naive, Method::CrossValidated],
            alphas: vec![0.05, 0.1, 0.2, 0.25, 0.3],
            replications: 100,
            master_seed: 1,
            adjustment: Adjustment::Ratio,
            cvt: CvtConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::param(
                "experiment.replications",
                "must be at least 1",
            ));
        }
        if self.alphas.is_empty() || self.alphas.iter().any(|&a| !(a > 0.0 && a < 1.0)) {
            return Err(Error::param(
                "experiment.alphas",
                "levels must lie in (0, 1)",
            ));
        }
        if self.methods.is_empty() {
            return Err(Error::param(
                "experiment.methods",
                "at least one method is required",
            ));
        }
        if self.design.cal_size == 0 && self.methods.contains(&Method::Conformal) {
            return Err(Error::param("design.cal_size", "must be at least 1"));
        }
        self.design.validate()?;
        self.cvt.validate()?;
        if let GraphSource::Sbm {
            params, directed, ..
        } = &self.source
        {
            params.validate(*directed)?;
        }
        Ok(())
    }
}

/// Seed of replication `rep`, also written to the CSV.
pub fn replication_seed(master: u64, rep: usize) -> u64 {
    rng::split(master, rep as u64)
}

/// Draws the experiment of replication `rep`.
pub fn replication_experiment(
    config: &ExperimentConfig,
    rep: usize,
) -> Result<(ObservedGraph, GroundTruth)> {
    let seed = replication_seed(config.master_seed, rep);
    let drawn;
    let a_star = match &config.source {
        GraphSource::Sbm {
            params,
            n,
            directed,
            self_pairs,
        } => {
            let mut graph_rng = rng::stream(rng::split(seed, tag::GRAPH));
            drawn = gen_sbm(params, *n, *directed, *self_pairs, &mut graph_rng)?.adjacency;
            &drawn
        }
        GraphSource::Fixed(graph) => graph,
    };
    make_experiment(
        a_star,
        &config.design,
        &mut rng::stream(rng::split(seed, tag::SPLIT)),
    )
}

pub fn run_replication(config: &ExperimentConfig, rep: usize) -> Result<Vec<MetricsRecord>> {
    let seed = replication_seed(config.master_seed, rep);
    let (observed, truth) = replication_experiment(config, rep)?;
    if partition_pairs(&observed).dtest().is_empty() {
        return Err(Error::EmptyTestSet);
    }

    let mut records = Vec::with_capacity(config.methods.len() * config.alphas.len());
    let mut push = |method: Method, alpha: f64, selected: &[Pair]| {
        records.push(MetricsRecord {
            method,
            alpha,
            replication: rep,
            fdp: fdp(selected, &truth.h0),
            tdp: tdp(selected, &truth.h1),
            n_selected: selected.len(),
            seed,
        });
    };
    for &method in &config.methods {
        match method {
            Method::Conformal => {
                let scores = CalibratedScores::prepare(
                    &observed,
                    config.scorer.predictor(),
                    config.design.cal_size,
                    rng::split(seed, tag::CONFORMAL),
                )?;
                for &alpha in &config.alphas {
                    push(
                        method,
                        alpha,
                        &scores.select(alpha, config.adjustment)?.selected,
                    );
                }
            }
            Method::Naive => {
                let scores = NaiveScores::prepare(
                    &observed,
                    config.scorer.predictor(),
                    rng::split(seed, tag::NAIVE),
                )?;
                for &alpha in &config.alphas {
                    push(method, alpha, &scores.select(alpha)?.selected);
                }
            }
            Method::CrossValidated => {
                let scores = ValidatedScores::prepare(
                    &observed,
                    config.scorer.predictor(),
                    &config.cvt,
                    rng::split(seed, tag::CROSS_VALIDATED),
                )?;
                for &alpha in &config.alphas {
                    push(method, alpha, &scores.select(alpha)?.selected);
                }
            }
        }
    }
    Ok(records)
}

/// Runs every replication. Any failing replication aborts the experiment.
/// The output does not depend on `parallel`.
pub fn run_experiment(config: &ExperimentConfig, parallel: bool) -> Result<Vec<MetricsRecord>> {
    config.validate()?;
    let per_rep: Vec<Vec<MetricsRecord>> = if parallel {
        (0..config.replications)
            .into_par_iter()
            .map(|rep| run_replication(config, rep))
            .collect::<Result<_>>()?
    } else {
        (0..config.replications)
            .map(|rep| run_replication(config, rep))
            .collect::<Result<_>>()?
    };
    Ok(per_rep.into_iter().flatten().collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub method: Method,
    pub alpha: f64,
    pub replications: usize,
    pub fdr: f64,
    pub fdr_std: f64,
    pub tdr: f64,
    pub tdr_std: f64,
}

impl Summary {
    /// Standard error of the FDR estimate.
    pub fn fdr_se(&self) -> f64 {
        self.fdr_std / (self.replications as f64).sqrt()
    }

    pub fn tdr_se(&self) -> f64 {
        self.tdr_std / (self.replications as f64).sqrt()
    }
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// α, then the FDP and TDP of every replication.
type Cell = (f64, Vec<f64>, Vec<f64>);

/// Mean and sample standard deviation of FDP and TDP per (method, α).
pub fn aggregate(records: &[MetricsRecord]) -> Vec<Summary> {
    let mut sorted: Vec<&MetricsRecord> = records.iter().collect();
    sorted.sort_by(|a, b| {
        (a.method, a.replication)
            .cmp(&(b.method, b.replication))
            .then(a.alpha.total_cmp(&b.alpha))
    });
    let mut cells: BTreeMap<(Method, u64), Cell> = BTreeMap::new();
    for r in sorted {
        let cell = cells
            .entry((r.method, r.alpha.to_bits()))
            .or_insert_with(|| (r.alpha, Vec::new(), Vec::new()));
        cell.1.push(r.fdp);
        cell.2.push(r.tdp);
    }
    let mut out: Vec<Summary> = cells
        .into_iter()
        .map(|((method, _), (alpha, fdps, tdps))| {
            let (fdr, fdr_std) = mean_std(&fdps);
            let (tdr, tdr_std) = mean_std(&tdps);
            Summary {
                method,
                alpha,
                replications: fdps.len(),
                fdr,
                fdr_std,
                tdr,
                tdr_std,
            }
        })
        .collect();
    out.sort_by(|a, b| a.method.cmp(&b.method).then(a.alpha.total_cmp(&b.alpha)));
    out
}

pub fn write_csv<W: Write>(records: &[MetricsRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}

/// Plain-text table: one row per (method, α), standard deviations in brackets.
pub fn format_summary(summaries: &[Summary]) -> String {
    let mut s = format!(
        "{:<10} {:>6} {:>5} {:>18} {:>18}\n",
        "method", "alpha", "reps", "FDR (sd)", "TDR (sd)"
    );
    for row in summaries {
        s.push_str(&format!(
            "{:<10} {:>6} {:>5} {:>18} {:>18}\n",
            row.method.name(),
            row.alpha,
            row.replications,
            format!("{:.3} ({:.3})", row.fdr, row.fdr_std),
            format!("{:.3} ({:.3})", row.tdr, row.tdr_std),
        ));
    }
    s
}
