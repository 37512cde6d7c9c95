//! Scoring functions.
//!
//! A [`LinkPredictor`] is any link prediction method: it may learn from the
//! sampled pairs of a graph, then scores arbitrary pairs. A fitted
//! [`Scorer`] bundles a predictor with the graph it was fitted on.
//! [`build_scorer`] fits on the reference-masked graph, so that reference
//! pairs are never learning examples.

pub mod heuristics;
pub mod logistic;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::RngCore;

pub use heuristics::{
    adamic_adar, cn_score, extract_features, jaccard, preferential_attachment, resource_allocation,
    FeatureVector, FEATURE_NAMES,
};
pub use logistic::{fit_logistic_erm, LogisticFit, LogisticModel, LogisticProblem, TrainConfig};

use crate::error::{Error, Result};
use crate::graph::{mask_reference, ObservedGraph, Pair};
use crate::rng;

pub trait LinkPredictor: Send + Sync {
    fn name(&self) -> &str;

    /// Learns from the sampled pairs of `graph`. Must not look at anything
    /// but `graph`.
    fn fit(&mut self, _graph: &ObservedGraph, _rng: &mut dyn RngCore) -> Result<()> {
        Ok(())
    }

    fn score(&self, graph: &ObservedGraph, pair: Pair) -> f64;

    /// Pairs used as learning examples by the last `fit`.
    fn training_pairs(&self) -> &[Pair] {
        &[]
    }

    /// Whether scores are already probabilities in `[0, 1]`.
    fn unit_interval(&self) -> bool {
        false
    }

    /// Whether `fit` learns from labeled pairs (as opposed to a fixed heuristic).
    fn is_trained(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Heuristic {
    CommonNeighbors,
    Jaccard,
    AdamicAdar,
    ResourceAllocation,
    PreferentialAttachment,
}

impl LinkPredictor for Heuristic {
    fn name(&self) -> &str {
        match self {
            Heuristic::CommonNeighbors => "cn",
            Heuristic::Jaccard => "jaccard",
            Heuristic::AdamicAdar => "adamic-adar",
            Heuristic::ResourceAllocation => "resource-allocation",
            Heuristic::PreferentialAttachment => "preferential-attachment",
        }
    }

    fn score(&self, graph: &ObservedGraph, pair: Pair) -> f64 {
        match self {
            Heuristic::CommonNeighbors => cn_score(graph, pair),
            Heuristic::Jaccard => jaccard(graph, pair),
            Heuristic::AdamicAdar => adamic_adar(graph, pair),
            Heuristic::ResourceAllocation => resource_allocation(graph, pair),
            Heuristic::PreferentialAttachment => preferential_attachment(graph, pair),
        }
    }

    fn unit_interval(&self) -> bool {
        matches!(self, Heuristic::Jaccard)
    }
}

#[derive(Debug, Clone)]
pub struct LogisticPredictor {
    config: TrainConfig,
    fit: Option<LogisticFit>,
}

impl LogisticPredictor {
    pub fn new(config: TrainConfig) -> Self {
        LogisticPredictor { config, fit: None }
    }

    pub fn fitted(&self) -> Option<&LogisticFit> {
        self.fit.as_ref()
    }
}

impl LinkPredictor for LogisticPredictor {
    fn name(&self) -> &str {
        "logistic"
    }

    fn fit(&mut self, graph: &ObservedGraph, rng: &mut dyn RngCore) -> Result<()> {
        self.fit = Some(fit_logistic_erm(graph, &self.config, rng)?);
        Ok(())
    }

    fn score(&self, graph: &ObservedGraph, pair: Pair) -> f64 {
        let fit = self.fit.as_ref().expect("logistic scorer used before fit");
        let features = logistic::pair_features(graph, pair, self.config.exclude_target_edge);
        fit.model.probability(features.as_slice())
    }

    fn training_pairs(&self) -> &[Pair] {
        self.fit.as_ref().map_or(&[], |f| &f.training_pairs)
    }

    fn unit_interval(&self) -> bool {
        true
    }

    fn is_trained(&self) -> bool {
        true
    }
}

/// The built-in scorers.
#[derive(Debug, Clone, PartialEq)]
pub enum ScorerKind {
    Heuristic(Heuristic),
    Logistic(TrainConfig),
}

impl ScorerKind {
    pub const CN: ScorerKind = ScorerKind::Heuristic(Heuristic::CommonNeighbors);

    pub fn predictor(&self) -> Box<dyn LinkPredictor> {
        match self {
            ScorerKind::Heuristic(h) => Box::new(*h),
            ScorerKind::Logistic(config) => Box::new(LogisticPredictor::new(config.clone())),
        }
    }

    pub fn is_learned(&self) -> bool {
        matches!(self, ScorerKind::Logistic(_))
    }
}

impl FromStr for ScorerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let kind = match s.to_ascii_lowercase().as_str() {
            "cn" | "common-neighbors" => ScorerKind::Heuristic(Heuristic::CommonNeighbors),
            "jaccard" => ScorerKind::Heuristic(Heuristic::Jaccard),
            "aa" | "adamic-adar" => ScorerKind::Heuristic(Heuristic::AdamicAdar),
            "ra" | "resource-allocation" => ScorerKind::Heuristic(Heuristic::ResourceAllocation),
            "pa" | "preferential-attachment" => {
                ScorerKind::Heuristic(Heuristic::PreferentialAttachment)
            }
            "logistic" | "erm" => ScorerKind::Logistic(TrainConfig::default()),
            other => return Err(Error::param("scorer", format!("unknown scorer `{other}`"))),
        };
        Ok(kind)
    }
}

impl fmt::Display for ScorerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScorerKind::Heuristic(h) => f.write_str(h.name()),
            ScorerKind::Logistic(_) => f.write_str("logistic"),
        }
    }
}

/// A predictor fitted on a particular (possibly masked) graph.
pub struct Scorer {
    graph: ObservedGraph,
    predictor: Box<dyn LinkPredictor>,
}

impl fmt::Debug for Scorer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Scorer")
            .field("predictor", &self.predictor.name())
            .field("n", &self.graph.n())
            .finish()
    }
}

impl Scorer {
    pub fn fit(
        mut predictor: Box<dyn LinkPredictor>,
        graph: ObservedGraph,
        rng: &mut dyn RngCore,
    ) -> Result<Self> {
        predictor.fit(&graph, rng)?;
        Ok(Scorer { graph, predictor })
    }

    pub fn name(&self) -> &str {
        self.predictor.name()
    }

    pub fn graph(&self) -> &ObservedGraph {
        &self.graph
    }

    pub fn score(&self, pair: Pair) -> f64 {
        self.predictor.score(&self.graph, pair)
    }

    /// Scores `pairs`, rejecting non-finite values.
    pub fn scores(&self, pairs: &[Pair]) -> Result<Vec<f64>> {
        pairs
            .iter()
            .map(|&pair| {
                let value = self.score(pair);
                if value.is_finite() {
                    Ok(value)
                } else {
                    Err(Error::NonFiniteScore { pair, value })
                }
            })
            .collect()
    }

    pub fn training_pairs(&self) -> &[Pair] {
        self.predictor.training_pairs()
    }

    pub fn unit_interval(&self) -> bool {
        self.predictor.unit_interval()
    }

    /// Fails if any learning example is in `held_out`.
    pub fn assert_disjoint(&self, held_out: &[Pair], what: &'static str) -> Result<()> {
        let held: HashSet<Pair> = held_out.iter().map(|&p| self.graph.canonical(p)).collect();
        let count = self
            .training_pairs()
            .iter()
            .filter(|p| held.contains(&self.graph.canonical(**p)))
            .count();
        if count > 0 {
            return Err(Error::Leakage { what, count });
        }
        Ok(())
    }
}

/// Fits `kind` on the graph with the reference pairs masked out, and checks
/// that none of them became a learning example.
pub fn build_scorer(
    kind: &ScorerKind,
    graph: &ObservedGraph,
    dcal: &[Pair],
    seed: u64,
) -> Result<Scorer> {
    build_scorer_with(kind.predictor(), graph, dcal, seed)
}

pub fn build_scorer_with(
    predictor: Box<dyn LinkPredictor>,
    graph: &ObservedGraph,
    dcal: &[Pair],
    seed: u64,
) -> Result<Scorer> {
    let masked = mask_reference(graph, dcal)?;
    let mut rng = rng::stream(seed);
    let scorer = Scorer::fit(predictor, masked, &mut rng)?;
    scorer.assert_disjoint(dcal, "reference")?;
    Ok(scorer)
}

/// Standardizes and applies the sigmoid. Constant input (zero standard
/// deviation) maps to 0.5 everywhere.
pub fn normalize_scores(scores: &[f64]) -> Vec<f64> {
    if scores.is_empty() {
        return Vec::new();
    }
    let m = scores.len() as f64;
    let mean = scores.iter().sum::<f64>() / m;
    let var = scores.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / m;
    let std = var.sqrt();
    if std.is_nan() || std <= 0.0 {
        return vec![0.5; scores.len()];
    }
    scores
        .iter()
        .map(|s| 1.0 / (1.0 + (-(s - mean) / std).exp()))
        .collect()
}
