//! Logistic regression on pair features, trained by full-batch gradient
//! descent on the mean cross-entropy.

use rand::seq::index;
use rand::RngCore;

use super::heuristics::{AdjView, FeatureVector};
use crate::error::{Error, Result};
use crate::graph::{partition_pairs, ObservedGraph, Pair};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub iterations: usize,
    /// Compute each training pair's features with its own edge removed, so
    /// positives look like hidden true edges rather than observed ones.
    pub exclude_target_edge: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.1,
            iterations: 500,
            exclude_target_edge: true,
        }
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

// log(1 + e^z) without overflow
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// A binary classification problem with dense rows. Parameters are laid out
/// as `[w_1, …, w_d, b]`.
#[derive(Debug, Clone)]
pub struct LogisticProblem {
    rows: Vec<Vec<f64>>,
    labels: Vec<f64>,
    dim: usize,
}

impl LogisticProblem {
    pub fn new(rows: Vec<Vec<f64>>, labels: Vec<f64>) -> Result<Self> {
        if rows.is_empty() || rows.len() != labels.len() {
            return Err(Error::EmptyTrainingSet);
        }
        let dim = rows[0].len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::param("rows", "ragged feature rows"));
        }
        if !labels.contains(&1.0) || !labels.contains(&0.0) {
            return Err(Error::MissingClass);
        }
        Ok(LogisticProblem { rows, labels, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn logit(&self, row: &[f64], params: &[f64]) -> f64 {
        row.iter().zip(params).map(|(x, w)| x * w).sum::<f64>() + params[self.dim]
    }

    /// Mean cross-entropy `−y log p − (1 − y) log(1 − p)`.
    pub fn loss(&self, params: &[f64]) -> f64 {
        let total: f64 = self
            .rows
            .iter()
            .zip(&self.labels)
            .map(|(row, &y)| {
                let z = self.logit(row, params);
                softplus(z) - y * z
            })
            .sum();
        total / self.rows.len() as f64
    }

    pub fn gradient(&self, params: &[f64]) -> Vec<f64> {
        let mut grad = vec![0.0; self.dim + 1];
        for (row, &y) in self.rows.iter().zip(&self.labels) {
            let r = sigmoid(self.logit(row, params)) - y;
            for (g, x) in grad.iter_mut().zip(row) {
                *g += r * x;
            }
            grad[self.dim] += r;
        }
        let m = self.rows.len() as f64;
        grad.iter_mut().for_each(|g| *g /= m);
        grad
    }

    /// Gradient descent from zero. A step that would raise the loss is
    /// retried with half the learning rate, so the returned loss history is
    /// non-increasing.
    pub fn train(&self, learning_rate: f64, iterations: usize) -> (Vec<f64>, Vec<f64>) {
        let mut params = vec![0.0; self.dim + 1];
        let mut loss = self.loss(&params);
        let mut history = vec![loss];
        let mut lr = learning_rate;
        'outer: for _ in 0..iterations {
            let grad = self.gradient(&params);
            loop {
                let candidate: Vec<f64> =
                    params.iter().zip(&grad).map(|(p, g)| p - lr * g).collect();
                let next = self.loss(&candidate);
                if next <= loss {
                    params = candidate;
                    loss = next;
                    history.push(loss);
                    break;
                }
                lr *= 0.5;
                if lr < 1e-12 {
                    break 'outer;
                }
            }
        }
        (params, history)
    }

    pub fn accuracy(&self, params: &[f64]) -> f64 {
        let correct = self
            .rows
            .iter()
            .zip(&self.labels)
            .filter(|(row, &y)| (self.logit(row, params) > 0.0) == (y == 1.0))
            .count();
        correct as f64 / self.rows.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl LogisticModel {
    pub fn probability(&self, features: &[f64]) -> f64 {
        let z: f64 = features
            .iter()
            .zip(&self.weights)
            .zip(self.mean.iter().zip(&self.std))
            .map(|((x, w), (m, s))| w * (x - m) / s)
            .sum::<f64>()
            + self.bias;
        sigmoid(z)
    }
}

#[derive(Debug, Clone)]
pub struct LogisticFit {
    pub model: LogisticModel,
    /// The balanced example set: every observed edge plus as many sampled
    /// non-edges.
    pub training_pairs: Vec<Pair>,
    pub loss_history: Vec<f64>,
}

pub(crate) fn pair_features(
    graph: &ObservedGraph,
    pair: Pair,
    exclude_target: bool,
) -> FeatureVector {
    if exclude_target {
        AdjView::without_edge(graph, pair).features(pair)
    } else {
        AdjView::new(graph).features(pair)
    }
}

/// Fits the logistic scorer on the sampled pairs of `graph`: all observed
/// edges against a uniform subsample of observed non-edges of the same size
/// (smaller if not enough non-edges exist).
pub fn fit_logistic_erm(
    graph: &ObservedGraph,
    config: &TrainConfig,
    rng: &mut dyn RngCore,
) -> Result<LogisticFit> {
    let sets = partition_pairs(graph);
    let positives = sets.dtr_alt();
    let null = sets.dtr_null();
    if positives.is_empty() || null.is_empty() {
        return Err(Error::MissingClass);
    }
    let n_neg = positives.len().min(null.len());
    if n_neg < positives.len() {
        log::warn!(
            "only {} observed false edges for {} observed true edges; training set is unbalanced",
            null.len(),
            positives.len()
        );
    }
    let mut negatives: Vec<Pair> = index::sample(rng, null.len(), n_neg)
        .into_iter()
        .map(|k| null[k])
        .collect();
    negatives.sort_unstable();

    let training_pairs: Vec<Pair> = positives.iter().chain(&negatives).copied().collect();
    let raw: Vec<FeatureVector> = training_pairs
        .iter()
        .map(|&p| pair_features(graph, p, config.exclude_target_edge))
        .collect();
    let labels: Vec<f64> = (0..training_pairs.len())
        .map(|k| if k < positives.len() { 1.0 } else { 0.0 })
        .collect();

    let dim = FeatureVector::DIM;
    let m = raw.len() as f64;
    let mean: Vec<f64> = (0..dim)
        .map(|c| raw.iter().map(|f| f.0[c]).sum::<f64>() / m)
        .collect();
    let std: Vec<f64> = (0..dim)
        .map(|c| {
            let var = raw.iter().map(|f| (f.0[c] - mean[c]).powi(2)).sum::<f64>() / m;
            if var > 0.0 {
                var.sqrt()
            } else {
                1.0
            }
        })
        .collect();
    let rows: Vec<Vec<f64>> = raw
        .iter()
        .map(|f| (0..dim).map(|c| (f.0[c] - mean[c]) / std[c]).collect())
        .collect();

    let problem = LogisticProblem::new(rows, labels)?;
    let (params, loss_history) = problem.train(config.learning_rate, config.iterations);
    let model = LogisticModel {
        weights: params[..dim].to_vec(),
        bias: params[dim],
        mean,
        std,
    };
    Ok(LogisticFit {
        model,
        training_pairs,
        loss_history,
    })
}
