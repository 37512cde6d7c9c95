//! Partially observed graphs.
//!
//! An [`ObservedGraph`] is the observation `(A, X, Ω)`: the observed adjacency
//! `A`, optional node covariates `X` and the sampling mask `Ω`. Pairs with
//! `Ω = 1` are sampled; their status (true or false edge) is known. Pairs with
//! `Ω = 0` are the test pairs whose status must be predicted. `A = Ω·A*`
//! always holds, so an observed edge is always a sampled pair.
//!
//! The mask is stored as the (usually small) set of unsampled pairs; the
//! adjacency as sorted neighbor lists.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u32);

impl NodeId {
    pub fn new(index: usize) -> Self {
        NodeId(u32::try_from(index).expect("node index exceeds u32"))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A node pair. Undirected graphs store pairs canonically with `i <= j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pair {
    pub i: NodeId,
    pub j: NodeId,
}

impl Pair {
    pub fn new(i: usize, j: usize) -> Self {
        Pair {
            i: NodeId::new(i),
            j: NodeId::new(j),
        }
    }

    pub fn reversed(self) -> Self {
        Pair {
            i: self.j,
            j: self.i,
        }
    }

    pub fn ordered(self) -> Self {
        if self.i <= self.j {
            self
        } else {
            self.reversed()
        }
    }

    pub fn is_self_pair(self) -> bool {
        self.i == self.j
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

/// Node covariates, row-major `n × dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct Covariates {
    dim: usize,
    values: Vec<f64>,
}

impl Covariates {
    pub fn new(n: usize, dim: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * dim {
            return Err(Error::param(
                "covariates",
                format!(
                    "expected {}×{} = {} values, got {}",
                    n,
                    dim,
                    n * dim,
                    values.len()
                ),
            ));
        }
        Ok(Covariates { dim, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, node: NodeId) -> &[f64] {
        let start = node.index() * self.dim;
        &self.values[start..start + self.dim]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservedGraph {
    n: usize,
    directed: bool,
    self_pairs: bool,
    out_adj: Vec<Vec<NodeId>>,
    in_adj: Vec<Vec<NodeId>>,
    unsampled: BTreeSet<Pair>,
    edge_count: usize,
    covariates: Option<Covariates>,
}

/// Collects edges and unsampled pairs, then validates them into an
/// [`ObservedGraph`].
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    n: usize,
    directed: bool,
    self_pairs: bool,
    edges: Vec<Pair>,
    unsampled: Vec<Pair>,
    covariates: Option<Covariates>,
}

impl GraphBuilder {
    pub fn new(n: usize, directed: bool) -> Self {
        GraphBuilder {
            n,
            directed,
            self_pairs: true,
            edges: Vec::new(),
            unsampled: Vec::new(),
            covariates: None,
        }
    }

    /// Whether `(i, i)` pairs belong to the pair universe. Defaults to true.
    pub fn self_pairs(mut self, allowed: bool) -> Self {
        self.self_pairs = allowed;
        self
    }

    pub fn edge(mut self, i: usize, j: usize) -> Self {
        self.edges.push(Pair::new(i, j));
        self
    }

    pub fn edges<I: IntoIterator<Item = (usize, usize)>>(mut self, edges: I) -> Self {
        self.edges
            .extend(edges.into_iter().map(|(i, j)| Pair::new(i, j)));
        self
    }

    pub fn unsampled(mut self, i: usize, j: usize) -> Self {
        self.unsampled.push(Pair::new(i, j));
        self
    }

    pub fn unsampled_pairs<I: IntoIterator<Item = (usize, usize)>>(mut self, pairs: I) -> Self {
        self.unsampled
            .extend(pairs.into_iter().map(|(i, j)| Pair::new(i, j)));
        self
    }

    pub fn covariates(mut self, covariates: Covariates) -> Self {
        self.covariates = Some(covariates);
        self
    }

    pub fn build(self) -> Result<ObservedGraph> {
        let mut graph = ObservedGraph {
            n: self.n,
            directed: self.directed,
            self_pairs: self.self_pairs,
            out_adj: vec![Vec::new(); self.n],
            in_adj: if self.directed {
                vec![Vec::new(); self.n]
            } else {
                Vec::new()
            },
            unsampled: BTreeSet::new(),
            edge_count: 0,
            covariates: None,
        };
        if let Some(cov) = self.covariates {
            if cov.values.len() != self.n * cov.dim {
                return Err(Error::param("covariates", "row count does not match n"));
            }
            graph.covariates = Some(cov);
        }
        for pair in self.unsampled {
            let pair = graph.check_pair(pair)?;
            graph.unsampled.insert(pair);
        }
        let mut edges = BTreeSet::new();
        for pair in self.edges {
            let pair = graph.check_pair(pair)?;
            if graph.unsampled.contains(&pair) {
                return Err(Error::EdgeMarkedUnsampled(pair));
            }
            edges.insert(pair);
        }
        graph.set_edges(edges);
        Ok(graph)
    }
}

impl ObservedGraph {
    /// A fully observed graph (`Ω` all ones), used for ground-truth adjacency.
    pub fn complete_observation<I>(
        n: usize,
        directed: bool,
        self_pairs: bool,
        edges: I,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = Pair>,
    {
        let mut builder = GraphBuilder::new(n, directed).self_pairs(self_pairs);
        builder.edges = edges.into_iter().collect();
        builder.build()
    }

    fn set_edges(&mut self, edges: BTreeSet<Pair>) {
        for adj in &mut self.out_adj {
            adj.clear();
        }
        for adj in &mut self.in_adj {
            adj.clear();
        }
        self.edge_count = edges.len();
        for pair in edges {
            self.out_adj[pair.i.index()].push(pair.j);
            if self.directed {
                self.in_adj[pair.j.index()].push(pair.i);
            } else if !pair.is_self_pair() {
                self.out_adj[pair.j.index()].push(pair.i);
            }
        }
        for adj in self.out_adj.iter_mut().chain(self.in_adj.iter_mut()) {
            adj.sort_unstable();
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn has_self_pairs(&self) -> bool {
        self.self_pairs
    }

    /// Number of observed edges, counted once per canonical pair.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn covariates(&self) -> Option<&Covariates> {
        self.covariates.as_ref()
    }

    pub fn with_covariates(mut self, covariates: Covariates) -> Result<Self> {
        if covariates.values.len() != self.n * covariates.dim {
            return Err(Error::param("covariates", "row count does not match n"));
        }
        self.covariates = Some(covariates);
        Ok(self)
    }

    pub fn check_node(&self, node: NodeId) -> Result<NodeId> {
        if node.index() < self.n {
            Ok(node)
        } else {
            Err(Error::NodeOutOfRange {
                node: node.index(),
                n: self.n,
            })
        }
    }

    /// Validates `pair` and returns its canonical form.
    pub fn check_pair(&self, pair: Pair) -> Result<Pair> {
        self.check_node(pair.i)?;
        self.check_node(pair.j)?;
        if pair.is_self_pair() && !self.self_pairs {
            return Err(Error::SelfPairNotAllowed(pair));
        }
        Ok(self.canonical(pair))
    }

    pub fn canonical(&self, pair: Pair) -> Pair {
        if self.directed {
            pair
        } else {
            pair.ordered()
        }
    }

    /// `A_ij`. Out-of-range pairs read as 0.
    pub fn has_edge(&self, pair: Pair) -> bool {
        pair.i.index() < self.n && self.out_adj[pair.i.index()].binary_search(&pair.j).is_ok()
    }

    /// `Ω_ij`.
    pub fn is_sampled(&self, pair: Pair) -> bool {
        !self.unsampled.contains(&self.canonical(pair))
    }

    /// Neighbors of `node`; out-neighbors for directed graphs.
    pub fn neighbors(&self, node: NodeId) -> Result<&[NodeId]> {
        self.check_node(node)?;
        Ok(self.row(node))
    }

    pub fn out_neighbors(&self, node: NodeId) -> Result<&[NodeId]> {
        self.neighbors(node)
    }

    pub fn in_neighbors(&self, node: NodeId) -> Result<&[NodeId]> {
        self.check_node(node)?;
        Ok(self.col(node))
    }

    /// Degree of `node`; out-degree for directed graphs. A self-loop counts once.
    pub fn degree(&self, node: NodeId) -> Result<usize> {
        Ok(self.neighbors(node)?.len())
    }

    pub fn in_degree(&self, node: NodeId) -> Result<usize> {
        Ok(self.in_neighbors(node)?.len())
    }

    /// `A_{i,•}` as a sorted list of columns.
    pub(crate) fn row(&self, node: NodeId) -> &[NodeId] {
        &self.out_adj[node.index()]
    }

    /// `A_{•,j}` as a sorted list of rows.
    pub(crate) fn col(&self, node: NodeId) -> &[NodeId] {
        if self.directed {
            &self.in_adj[node.index()]
        } else {
            &self.out_adj[node.index()]
        }
    }

    /// The pair universe in lexicographic order: `i <= j` for undirected
    /// graphs, all ordered pairs for directed ones.
    pub fn pairs(&self) -> impl Iterator<Item = Pair> + '_ {
        let n = self.n;
        (0..n).flat_map(move |i| {
            let start = if self.directed { 0 } else { i };
            (start..n)
                .filter(move |&j| self.self_pairs || i != j)
                .map(move |j| Pair::new(i, j))
        })
    }

    pub fn universe_size(&self) -> usize {
        let n = self.n;
        match (self.directed, self.self_pairs) {
            (true, true) => n * n,
            (true, false) => n * n.saturating_sub(1),
            (false, true) => n * (n + 1) / 2,
            (false, false) => n * n.saturating_sub(1) / 2,
        }
    }

    /// Observed edges, canonical, lexicographic.
    pub fn edges(&self) -> impl Iterator<Item = Pair> + '_ {
        self.out_adj.iter().enumerate().flat_map(move |(i, adj)| {
            let i = NodeId::new(i);
            adj.iter()
                .filter(move |&&j| self.directed || i <= j)
                .map(move |&j| Pair { i, j })
        })
    }

    pub fn unsampled_pairs(&self) -> impl Iterator<Item = Pair> + '_ {
        self.unsampled.iter().copied()
    }

    /// Marks `pairs` as unsampled: `Ω_ij = 0` and, to keep `A = Ω·A*`,
    /// `A_ij = 0`. Idempotent. Pairs must already be validated.
    pub fn hide_pairs<'a, I>(&self, pairs: I) -> ObservedGraph
    where
        I: IntoIterator<Item = &'a Pair>,
    {
        let mut out = self.clone();
        let mut removed = false;
        for &pair in pairs {
            let pair = self.canonical(pair);
            out.unsampled.insert(pair);
            removed |= self.has_edge(pair);
        }
        if removed {
            let edges: BTreeSet<Pair> = self
                .edges()
                .filter(|p| !out.unsampled.contains(p))
                .collect();
            out.set_edges(edges);
        }
        out
    }
}

/// The partition of the pair universe induced by `Ω` and `A`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PairSets {
    pub(crate) dtr: Vec<Pair>,
    pub(crate) dtest: Vec<Pair>,
    pub(crate) dtr_null: Vec<Pair>,
    pub(crate) dtr_alt: Vec<Pair>,
    pub(crate) dcal: Option<Vec<Pair>>,
}

impl PairSets {
    /// Sampled pairs.
    pub fn dtr(&self) -> &[Pair] {
        &self.dtr
    }

    /// Unsampled pairs.
    pub fn dtest(&self) -> &[Pair] {
        &self.dtest
    }

    /// Sampled non-edges.
    pub fn dtr_null(&self) -> &[Pair] {
        &self.dtr_null
    }

    /// Sampled edges.
    pub fn dtr_alt(&self) -> &[Pair] {
        &self.dtr_alt
    }

    pub fn dcal(&self) -> Option<&[Pair]> {
        self.dcal.as_deref()
    }

    /// Attaches a reference set, which must be a subset of `dtr_null`.
    pub fn with_dcal(mut self, dcal: Vec<Pair>) -> Result<Self> {
        for pair in &dcal {
            if self.dtr_null.binary_search(pair).is_err() {
                return Err(Error::InvalidReferencePair {
                    pair: *pair,
                    reason: "not an observed false edge",
                });
            }
        }
        self.dcal = Some(dcal);
        Ok(self)
    }
}

/// Splits the pair universe into training (sampled) and test (unsampled)
/// pairs, and the training pairs into observed non-edges and edges. All
/// lists are sorted.
pub fn partition_pairs(graph: &ObservedGraph) -> PairSets {
    let mut sets = PairSets::default();
    for pair in graph.pairs() {
        if !graph.is_sampled(pair) {
            sets.dtest.push(pair);
        } else {
            sets.dtr.push(pair);
            if graph.has_edge(pair) {
                sets.dtr_alt.push(pair);
            } else {
                sets.dtr_null.push(pair);
            }
        }
    }
    sets
}

/// Zeroes the sampling mask on the reference pairs, so that a learned
/// scorer treats them like test pairs. `A` and `X` are unchanged.
///
/// Every reference pair must be an observed false edge.
pub fn mask_reference(graph: &ObservedGraph, dcal: &[Pair]) -> Result<ObservedGraph> {
    let mut checked = Vec::with_capacity(dcal.len());
    for &pair in dcal {
        let pair = graph.check_pair(pair)?;
        if graph.has_edge(pair) {
            return Err(Error::InvalidReferencePair {
                pair,
                reason: "pair is an observed true edge",
            });
        }
        if !graph.is_sampled(pair) {
            return Err(Error::InvalidReferencePair {
                pair,
                reason: "pair is not sampled",
            });
        }
        checked.push(pair);
    }
    Ok(graph.hide_pairs(&checked))
}

/// Full adjacency and the hidden test-set partition of a simulated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub a_star: ObservedGraph,
    /// Test pairs that are false edges.
    pub h0: Vec<Pair>,
    /// Test pairs that are true edges.
    pub h1: Vec<Pair>,
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// The five-node toy observation, 0-based: true edges
    /// (1,2),(1,4),(2,3),(2,5),(3,5); false edges (1,3),(1,5),(4,5);
    /// (2,4) and (3,4) unsampled (1-based labels).
    pub fn toy() -> ObservedGraph {
        GraphBuilder::new(5, false)
            .self_pairs(false)
            .edges([(0, 1), (0, 3), (1, 2), (1, 4), (2, 4)])
            .unsampled_pairs([(1, 3), (2, 3)])
            .build()
            .unwrap()
    }

    pub fn p(i: usize, j: usize) -> Pair {
        Pair::new(i - 1, j - 1)
    }
}
