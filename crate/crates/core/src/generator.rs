//! Stochastic block model graphs and the hidden-pair experiment built on them.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{GroundTruth, ObservedGraph, Pair, PairSets};

#[derive(Debug, Clone, PartialEq)]
pub struct SbmParams {
    pub pi: Vec<f64>,
    pub gamma: Vec<Vec<f64>>,
}

impl SbmParams {
    pub fn new(pi: Vec<f64>, gamma: Vec<Vec<f64>>) -> Result<Self> {
        let params = SbmParams { pi, gamma };
        params.validate(false)?;
        Ok(params)
    }

    /// The five-class design with community and hub structure:
    ///
    /// ```text
    /// ε p p p ε
    /// p ε p ε ε
    /// p p p ε ε
    /// p ε ε ε ε
    /// ε ε ε ε p
    /// ```
    /// with uniform class proportions.
    pub fn five_class_hub(p: f64, eps: f64) -> Self {
        let pattern = [
            [0, 1, 1, 1, 0],
            [1, 0, 1, 0, 0],
            [1, 1, 1, 0, 0],
            [1, 0, 0, 0, 0],
            [0, 0, 0, 0, 1],
        ];
        let gamma = pattern
            .iter()
            .map(|row| row.iter().map(|&b| if b == 1 { p } else { eps }).collect())
            .collect();
        SbmParams {
            pi: vec![0.2; 5],
            gamma,
        }
    }

    pub fn classes(&self) -> usize {
        self.pi.len()
    }

    pub fn validate(&self, directed: bool) -> Result<()> {
        let q = self.pi.len();
        if q == 0 {
            return Err(Error::param("sbm.pi", "at least one class is required"));
        }
        if self.pi.iter().any(|&p| !(p >= 0.0 && p.is_finite())) {
            return Err(Error::param("sbm.pi", "proportions must be nonnegative"));
        }
        let total: f64 = self.pi.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::param(
                "sbm.pi",
                format!("proportions sum to {total}, not 1"),
            ));
        }
        if self.gamma.len() != q || self.gamma.iter().any(|row| row.len() != q) {
            return Err(Error::param("sbm.gamma", format!("must be {q}×{q}")));
        }
        for (a, row) in self.gamma.iter().enumerate() {
            for (b, &g) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&g) {
                    return Err(Error::param(
                        "sbm.gamma",
                        format!("entry ({a},{b}) = {g} outside [0,1]"),
                    ));
                }
                if !directed && g != self.gamma[b][a] {
                    return Err(Error::param(
                        "sbm.gamma",
                        "must be symmetric for undirected graphs",
                    ));
                }
            }
        }
        Ok(())
    }

    /// Expected number of edges over the pair universe, with classes drawn
    /// independently per node.
    pub fn expected_edges(&self, n: usize, directed: bool, self_pairs: bool) -> f64 {
        let q = self.classes();
        let mut between = 0.0;
        let mut within = 0.0;
        for a in 0..q {
            within += self.pi[a] * self.gamma[a][a];
            for b in 0..q {
                between += self.pi[a] * self.pi[b] * self.gamma[a][b];
            }
        }
        let n = n as f64;
        let distinct = if directed {
            n * (n - 1.0)
        } else {
            n * (n - 1.0) / 2.0
        };
        let selfs = if self_pairs { n } else { 0.0 };
        distinct * between + selfs * within
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SbmGraph {
    pub adjacency: ObservedGraph,
    pub labels: Vec<usize>,
}

/// Draws a graph: node classes i.i.d. from `pi`, then every pair of the
/// universe independently with probability `gamma[z_i][z_j]`.
pub fn gen_sbm<R: Rng + ?Sized>(
    params: &SbmParams,
    n: usize,
    directed: bool,
    self_pairs: bool,
    rng: &mut R,
) -> Result<SbmGraph> {
    params.validate(directed)?;
    let classes =
        WeightedIndex::new(&params.pi).map_err(|e| Error::param("sbm.pi", e.to_string()))?;
    let labels: Vec<usize> = (0..n).map(|_| classes.sample(rng)).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        let start = if directed { 0 } else { i };
        for j in start..n {
            if i == j && !self_pairs {
                continue;
            }
            let prob = params.gamma[labels[i]][labels[j]];
            if rng.random::<f64>() < prob {
                edges.push(Pair::new(i, j));
            }
        }
    }
    let adjacency = ObservedGraph::complete_observation(n, directed, self_pairs, edges)?;
    Ok(SbmGraph { adjacency, labels })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentDesign {
    /// Fraction of true edges hidden in the test set.
    pub pi_mis: f64,
    /// `|H0| / |H1|`.
    pub ratio_h0_h1: f64,
    /// Requested reference-set size.
    pub cal_size: usize,
}

impl ExperimentDesign {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.pi_mis) {
            return Err(Error::param("design.pi_mis", "must lie in [0, 1]"));
        }
        if !(self.ratio_h0_h1 >= 0.0 && self.ratio_h0_h1.is_finite()) {
            return Err(Error::param(
                "design.ratio_h0_h1",
                "must be a nonnegative number",
            ));
        }
        Ok(())
    }

    /// `(|H1|, |H0|)` for a graph with `edges` true edges.
    pub fn hidden_counts(&self, edges: usize) -> (usize, usize) {
        let h1 = floor_count(self.pi_mis * edges as f64);
        let h0 = floor_count(self.ratio_h0_h1 * h1 as f64);
        (h1, h0)
    }
}

// Products like 0.1 * 1130 land a hair above or below the integer.
fn floor_count(x: f64) -> usize {
    (x + 1e-9).floor() as usize
}

/// Hides a uniform sample of true edges (H1) and of non-edges (H0) of the
/// fully observed `a_star`; everything else stays sampled.
pub fn make_experiment<R: Rng + ?Sized>(
    a_star: &ObservedGraph,
    design: &ExperimentDesign,
    rng: &mut R,
) -> Result<(ObservedGraph, GroundTruth)> {
    design.validate()?;
    let edges: Vec<Pair> = a_star.edges().collect();
    let (n_h1, n_h0) = design.hidden_counts(edges.len());
    if n_h1 > edges.len() {
        return Err(Error::Insufficient {
            what: "true edges",
            requested: n_h1,
            available: edges.len(),
        });
    }
    let available_null = a_star.universe_size() - edges.len();
    if n_h0 > available_null {
        return Err(Error::Insufficient {
            what: "non-edges",
            requested: n_h0,
            available: available_null,
        });
    }

    let mut h1: Vec<Pair> = index::sample(rng, edges.len(), n_h1)
        .into_iter()
        .map(|k| edges[k])
        .collect();
    h1.sort_unstable();

    let mut h0 = Vec::with_capacity(n_h0);
    if n_h0 > 0 {
        let non_edges: Vec<Pair> = a_star.pairs().filter(|&p| !a_star.has_edge(p)).collect();
        h0.extend(
            index::sample(rng, non_edges.len(), n_h0)
                .into_iter()
                .map(|k| non_edges[k]),
        );
        h0.sort_unstable();
    }

    let hidden: Vec<Pair> = h0.iter().chain(&h1).copied().collect();
    let observed = a_star.hide_pairs(&hidden);
    let truth = GroundTruth {
        a_star: a_star.clone(),
        h0,
        h1,
    };
    Ok((observed, truth))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceSample {
    pub pairs: Vec<Pair>,
    /// The requested size exceeded `|DtrNull|`, so all of it was taken.
    pub capped: bool,
}

/// Uniform sample without replacement of `min(size, |DtrNull|)` observed
/// false edges, sorted.
pub fn sample_reference<R: Rng + ?Sized>(
    pair_sets: &PairSets,
    size: usize,
    rng: &mut R,
) -> Result<ReferenceSample> {
    if size == 0 {
        return Err(Error::param("cal_size", "must be at least 1"));
    }
    let null = pair_sets.dtr_null();
    if null.is_empty() {
        return Err(Error::EmptyNullSet);
    }
    if size >= null.len() {
        if size > null.len() {
            log::debug!(
                "reference set capped at {} of {} requested pairs",
                null.len(),
                size
            );
        }
        return Ok(ReferenceSample {
            pairs: null.to_vec(),
            capped: size > null.len(),
        });
    }
    let mut pairs: Vec<Pair> = index::sample(rng, null.len(), size)
        .into_iter()
        .map(|k| null[k])
        .collect();
    pairs.sort_unstable();
    Ok(ReferenceSample {
        pairs,
        capped: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::toy;
    use crate::graph::partition_pairs;
    use crate::rng::stream;

    #[test]
    fn degenerate_connectivity() {
        let zeros = SbmParams::new(vec![0.5, 0.5], vec![vec![0.0; 2]; 2]).unwrap();
        let g = gen_sbm(&zeros, 20, false, true, &mut stream(1)).unwrap();
        assert_eq!(g.adjacency.edge_count(), 0);

        let ones = SbmParams::new(vec![0.5, 0.5], vec![vec![1.0; 2]; 2]).unwrap();
        for (directed, self_pairs) in [(false, true), (false, false), (true, true)] {
            let g = gen_sbm(&ones, 12, directed, self_pairs, &mut stream(1)).unwrap();
            assert_eq!(g.adjacency.edge_count(), g.adjacency.universe_size());
        }
    }

    #[test]
    fn hub_design_expectation() {
        let params = SbmParams::five_class_hub(0.5, 0.05);
        params.validate(false).unwrap();
        // π'γπ = (10·0.5 + 15·0.05) / 25 = 0.23, and the diagonal mean is also 0.23.
        let expected = params.expected_edges(100, false, true);
        assert!((expected - 5050.0 * 0.23).abs() < 1e-9);
        assert!((expected - 1150.0).abs() < 0.02 * 1150.0);
    }

    #[test]
    fn gen_sbm_is_deterministic() {
        let params = SbmParams::five_class_hub(0.5, 0.05);
        let a = gen_sbm(&params, 60, false, true, &mut stream(9)).unwrap();
        let b = gen_sbm(&params, 60, false, true, &mut stream(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(SbmParams::new(vec![0.5, 0.6], vec![vec![0.1; 2]; 2]).is_err());
        assert!(SbmParams::new(vec![1.0], vec![vec![1.5]]).is_err());
        let asym = SbmParams {
            pi: vec![0.5, 0.5],
            gamma: vec![vec![0.1, 0.2], vec![0.3, 0.1]],
        };
        assert!(asym.validate(false).is_err());
        assert!(asym.validate(true).is_ok());
    }

    #[test]
    fn default_design_counts() {
        let design = ExperimentDesign {
            pi_mis: 0.1,
            ratio_h0_h1: 0.5,
            cal_size: 5000,
        };
        assert_eq!(design.hidden_counts(1150), (115, 57));
    }

    #[test]
    fn experiment_hides_exactly_the_truth_sets() {
        let params = SbmParams::five_class_hub(0.5, 0.05);
        let g = gen_sbm(&params, 60, false, true, &mut stream(3))
            .unwrap()
            .adjacency;
        let design = ExperimentDesign {
            pi_mis: 0.1,
            ratio_h0_h1: 0.5,
            cal_size: 100,
        };
        let (observed, truth) = make_experiment(&g, &design, &mut stream(4)).unwrap();
        let (n1, n0) = design.hidden_counts(g.edge_count());
        assert_eq!((truth.h1.len(), truth.h0.len()), (n1, n0));
        assert!(truth.h1.iter().all(|&p| g.has_edge(p)));
        assert!(truth.h0.iter().all(|&p| !g.has_edge(p)));
        let sets = partition_pairs(&observed);
        let mut hidden: Vec<Pair> = truth.h0.iter().chain(&truth.h1).copied().collect();
        hidden.sort();
        assert_eq!(sets.dtest(), hidden.as_slice());
        for p in g.pairs() {
            assert_eq!(
                observed.has_edge(p),
                observed.is_sampled(p) && g.has_edge(p)
            );
        }
    }

    #[test]
    fn zero_missingness_and_zero_ratio() {
        let params = SbmParams::five_class_hub(0.5, 0.05);
        let g = gen_sbm(&params, 40, false, true, &mut stream(3))
            .unwrap()
            .adjacency;
        let none = ExperimentDesign {
            pi_mis: 0.0,
            ratio_h0_h1: 0.5,
            cal_size: 10,
        };
        let (observed, truth) = make_experiment(&g, &none, &mut stream(1)).unwrap();
        assert_eq!(observed, g);
        assert!(truth.h0.is_empty() && truth.h1.is_empty());

        let only_true = ExperimentDesign {
            pi_mis: 0.2,
            ratio_h0_h1: 0.0,
            cal_size: 10,
        };
        let (_, truth) = make_experiment(&g, &only_true, &mut stream(1)).unwrap();
        assert!(truth.h0.is_empty());
        assert!(!truth.h1.is_empty());
    }

    #[test]
    fn experiment_rejects_impossible_sizes() {
        let g =
            ObservedGraph::complete_observation(4, false, false, vec![Pair::new(0, 1)]).unwrap();
        let design = ExperimentDesign {
            pi_mis: 1.0,
            ratio_h0_h1: 10.0,
            cal_size: 1,
        };
        assert!(matches!(
            make_experiment(&g, &design, &mut stream(0)),
            Err(Error::Insufficient {
                what: "non-edges",
                ..
            })
        ));
    }

    #[test]
    fn reference_sampling() {
        let sets = partition_pairs(&toy());
        let all = sample_reference(&sets, 10, &mut stream(1)).unwrap();
        assert!(all.capped);
        assert_eq!(all.pairs, sets.dtr_null());

        let exact = sample_reference(&sets, 3, &mut stream(1)).unwrap();
        assert!(!exact.capped);

        let one = sample_reference(&sets, 1, &mut stream(5)).unwrap();
        assert_eq!(one.pairs.len(), 1);
        assert!(sets.dtr_null().contains(&one.pairs[0]));
        assert_eq!(one, sample_reference(&sets, 1, &mut stream(5)).unwrap());

        assert!(sample_reference(&sets, 0, &mut stream(5)).is_err());
        let empty = PairSets::default();
        assert!(matches!(
            sample_reference(&empty, 1, &mut stream(5)),
            Err(Error::EmptyNullSet)
        ));
    }
}
