//! Threshold baselines: naive thresholding at `1 − α`, and a threshold
//! chosen on a held-out validation split.

use rand::seq::index;

use crate::conformal::SelectionResult;
use crate::error::{Error, Result};
use crate::graph::{partition_pairs, ObservedGraph, Pair};
use crate::rng::{self, tag};
use crate::scoring::{normalize_scores, LinkPredictor, Scorer, ScorerKind};

/// Test scores of a scorer fitted on the unmodified graph, mapped to `[0, 1]`.
#[derive(Debug, Clone)]
pub struct NaiveScores {
    pub test: Vec<(Pair, f64)>,
}

impl NaiveScores {
    pub fn prepare(
        graph: &ObservedGraph,
        predictor: Box<dyn LinkPredictor>,
        seed: u64,
    ) -> Result<Self> {
        let sets = partition_pairs(graph);
        let mut rng = rng::stream(rng::split(seed, tag::FIT));
        let scorer = Scorer::fit(predictor, graph.clone(), &mut rng)?;
        let mut scores = scorer.scores(sets.dtest())?;
        if !scorer.unit_interval() {
            scores = normalize_scores(&scores);
        }
        Ok(NaiveScores {
            test: sets.dtest().iter().copied().zip(scores).collect(),
        })
    }

    pub fn select(&self, alpha: f64) -> Result<SelectionResult> {
        check_alpha(alpha)?;
        Ok(SelectionResult::at_threshold(
            &self.test,
            1.0 - alpha,
            alpha,
        ))
    }
}

pub fn nt_select(
    graph: &ObservedGraph,
    kind: &ScorerKind,
    alpha: f64,
    seed: u64,
) -> Result<SelectionResult> {
    NaiveScores::prepare(graph, kind.predictor(), seed)?.select(alpha)
}

/// Candidate thresholds.
#[derive(Debug, Clone, PartialEq)]
pub enum ThresholdGrid {
    /// `{(1 − α) / k}` for each divisor `k`.
    Divisors(Vec<f64>),
    Fixed(Vec<f64>),
}

impl ThresholdGrid {
    pub fn thresholds(&self, alpha: f64) -> Vec<f64> {
        match self {
            ThresholdGrid::Divisors(ks) => ks.iter().map(|k| (1.0 - alpha) / k).collect(),
            ThresholdGrid::Fixed(ts) => ts.clone(),
        }
    }
}

impl Default for ThresholdGrid {
    fn default() -> Self {
        ThresholdGrid::Divisors(vec![1.0, 5.0, 10.0, 20.0, 50.0, 100.0])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvtConfig {
    /// `|Dval|` as a fraction of the observed edge count, split evenly
    /// between true and false edges.
    pub val_fraction: f64,
    pub grid: ThresholdGrid,
}

impl Default for CvtConfig {
    fn default() -> Self {
        CvtConfig {
            val_fraction: 0.2,
            grid: ThresholdGrid::default(),
        }
    }
}

impl CvtConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.val_fraction > 0.0 && self.val_fraction < 1.0) {
            return Err(Error::param("cvt.val_fraction", "must lie in (0, 1)"));
        }
        match &self.grid {
            ThresholdGrid::Fixed(ts) if ts.iter().any(|t| !(0.0..=1.0).contains(t)) => {
                Err(Error::param("cvt.grid", "thresholds must lie in [0, 1]"))
            }
            ThresholdGrid::Divisors(ks) if ks.iter().any(|&k| k.is_nan() || k < 1.0) => {
                Err(Error::param("cvt.divisors", "divisors must be at least 1"))
            }
            _ => Ok(()),
        }
    }
}

/// Validation and test scores for cross-validated thresholding.
#[derive(Debug, Clone)]
pub struct ValidatedScores {
    /// `(score, is_true_edge)` for each validation pair.
    pub validation: Vec<(f64, bool)>,
    pub test: Vec<(Pair, f64)>,
    pub dval: Vec<Pair>,
    pub training_pairs: Vec<Pair>,
    grid: ThresholdGrid,
}

impl ValidatedScores {
    /// Draws the validation split, fits the scorer without it and scores
    /// validation and test pairs, normalized jointly.
    ///
    /// Learned scorers see the graph with the validation pairs hidden;
    /// heuristics are evaluated on the graph as is.
    pub fn prepare(
        graph: &ObservedGraph,
        predictor: Box<dyn LinkPredictor>,
        config: &CvtConfig,
        seed: u64,
    ) -> Result<Self> {
        config.validate()?;
        let sets = partition_pairs(graph);
        let per_class = (0.5 * config.val_fraction * sets.dtr_alt().len() as f64).floor() as usize;
        if per_class == 0 {
            return Err(Error::Insufficient {
                what: "observed true edges for a validation split",
                requested: 1,
                available: 0,
            });
        }
        if per_class > sets.dtr_null().len() {
            return Err(Error::Insufficient {
                what: "observed false edges for the validation split",
                requested: per_class,
                available: sets.dtr_null().len(),
            });
        }
        let mut rng = rng::stream(rng::split(seed, tag::VALIDATION));
        let mut val_true: Vec<Pair> = index::sample(&mut rng, sets.dtr_alt().len(), per_class)
            .into_iter()
            .map(|k| sets.dtr_alt()[k])
            .collect();
        let mut val_false: Vec<Pair> = index::sample(&mut rng, sets.dtr_null().len(), per_class)
            .into_iter()
            .map(|k| sets.dtr_null()[k])
            .collect();
        val_true.sort_unstable();
        val_false.sort_unstable();
        let dval: Vec<Pair> = val_true.iter().chain(&val_false).copied().collect();

        let fit_graph = if predictor.is_trained() {
            graph.hide_pairs(&dval)
        } else {
            graph.clone()
        };
        let mut fit_rng = rng::stream(rng::split(seed, tag::FIT));
        let scorer = Scorer::fit(predictor, fit_graph, &mut fit_rng)?;
        scorer.assert_disjoint(&dval, "validation")?;

        let mut val_scores = scorer.scores(&dval)?;
        let mut test_scores = scorer.scores(sets.dtest())?;
        if !scorer.unit_interval() {
            let mut pooled = val_scores.clone();
            pooled.extend_from_slice(&test_scores);
            let normalized = normalize_scores(&pooled);
            let (v, t) = normalized.split_at(val_scores.len());
            val_scores = v.to_vec();
            test_scores = t.to_vec();
        }
        Ok(ValidatedScores {
            validation: val_scores
                .into_iter()
                .enumerate()
                .map(|(k, s)| (s, k < per_class))
                .collect(),
            test: sets.dtest().iter().copied().zip(test_scores).collect(),
            dval,
            training_pairs: scorer.training_pairs().to_vec(),
            grid: config.grid.clone(),
        })
    }

    /// `#{false validation pairs ≥ t} / (1 ∨ #{validation pairs ≥ t})`.
    pub fn validation_fdp(&self, threshold: f64) -> f64 {
        let (selected, false_pos) = self
            .validation
            .iter()
            .filter(|(s, _)| *s >= threshold)
            .fold((0usize, 0usize), |(n, f), &(_, is_true)| {
                (n + 1, f + usize::from(!is_true))
            });
        false_pos as f64 / selected.max(1) as f64
    }

    /// Largest grid threshold whose validation FDP is at most `alpha`.
    pub fn choose_threshold(&self, alpha: f64) -> Option<f64> {
        self.grid
            .thresholds(alpha)
            .into_iter()
            .filter(|&t| self.validation_fdp(t) <= alpha)
            .max_by(f64::total_cmp)
    }

    pub fn select(&self, alpha: f64) -> Result<SelectionResult> {
        check_alpha(alpha)?;
        Ok(match self.choose_threshold(alpha) {
            Some(t) => SelectionResult::at_threshold(&self.test, t, alpha),
            None => SelectionResult::empty(alpha),
        })
    }
}

pub fn cvt_select(
    graph: &ObservedGraph,
    kind: &ScorerKind,
    alpha: f64,
    config: &CvtConfig,
    seed: u64,
) -> Result<SelectionResult> {
    ValidatedScores::prepare(graph, kind.predictor(), config, seed)?.select(alpha)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::param("alpha", format!("{alpha} is not in (0, 1)")))
    }
}
