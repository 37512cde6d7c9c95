//! Neighborhood heuristics and the pair feature vector.
//!
//! Directed graphs use out-neighborhoods: the common neighbors of `(i, j)`
//! are the nodes both point to. Self-pairs go through the same formulas, so
//! `cn(i, i) = deg(i)`.

use crate::graph::{NodeId, ObservedGraph, Pair};

/// Adjacency with at most one edge removed, which lets a pair's features be
/// computed as if its own edge were unobserved.
#[derive(Clone, Copy)]
pub(crate) struct AdjView<'a> {
    graph: &'a ObservedGraph,
    skip: Option<Pair>,
}

impl<'a> AdjView<'a> {
    pub(crate) fn new(graph: &'a ObservedGraph) -> Self {
        AdjView { graph, skip: None }
    }

    pub(crate) fn without_edge(graph: &'a ObservedGraph, pair: Pair) -> Self {
        let skip = graph.has_edge(pair).then_some(pair);
        AdjView { graph, skip }
    }

    fn skipped(&self, from: NodeId, to: NodeId) -> bool {
        match self.skip {
            None => false,
            Some(p) => {
                (p.i == from && p.j == to)
                    || (!self.graph.is_directed() && p.i == to && p.j == from)
            }
        }
    }

    fn out(&self, u: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.graph
            .row(u)
            .iter()
            .copied()
            .filter(move |&v| !self.skipped(u, v))
    }

    fn inn(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.graph
            .col(v)
            .iter()
            .copied()
            .filter(move |&u| !self.skipped(u, v))
    }

    fn out_degree(&self, u: NodeId) -> usize {
        self.out(u).count()
    }

    fn in_degree(&self, v: NodeId) -> usize {
        self.inn(v).count()
    }
}

/// Calls `f` on every element of two ascending sequences that appears in both.
fn for_each_common<A, B, F>(a: A, b: B, mut f: F)
where
    A: Iterator<Item = NodeId>,
    B: Iterator<Item = NodeId>,
    F: FnMut(NodeId),
{
    let mut a = a.peekable();
    let mut b = b.peekable();
    while let (Some(&x), Some(&y)) = (a.peek(), b.peek()) {
        match x.cmp(&y) {
            std::cmp::Ordering::Less => {
                a.next();
            }
            std::cmp::Ordering::Greater => {
                b.next();
            }
            std::cmp::Ordering::Equal => {
                f(x);
                a.next();
                b.next();
            }
        }
    }
}

fn count_common<A, B>(a: A, b: B) -> usize
where
    A: Iterator<Item = NodeId>,
    B: Iterator<Item = NodeId>,
{
    let mut count = 0;
    for_each_common(a, b, |_| count += 1);
    count
}

impl AdjView<'_> {
    fn cn(&self, pair: Pair) -> usize {
        count_common(self.out(pair.i), self.out(pair.j))
    }

    fn jaccard(&self, pair: Pair) -> f64 {
        let common = self.cn(pair);
        let union = self.out_degree(pair.i) + self.out_degree(pair.j) - common;
        if union == 0 {
            0.0
        } else {
            common as f64 / union as f64
        }
    }

    // Degree of a common neighbor as seen from the pair: its in-degree for
    // directed graphs.
    fn hub_degree(&self, u: NodeId) -> usize {
        if self.graph.is_directed() {
            self.in_degree(u)
        } else {
            self.out_degree(u)
        }
    }

    fn adamic_adar(&self, pair: Pair) -> f64 {
        let mut total = 0.0;
        for_each_common(self.out(pair.i), self.out(pair.j), |u| {
            let d = self.hub_degree(u);
            // ln(1) = 0; only reachable through self-pairs or self-loops.
            if d > 1 {
                total += 1.0 / (d as f64).ln();
            }
        });
        total
    }

    fn resource_allocation(&self, pair: Pair) -> f64 {
        let mut total = 0.0;
        for_each_common(self.out(pair.i), self.out(pair.j), |u| {
            let d = self.hub_degree(u);
            if d > 0 {
                total += 1.0 / d as f64;
            }
        });
        total
    }

    fn target_degree(&self, j: NodeId) -> usize {
        if self.graph.is_directed() {
            self.in_degree(j)
        } else {
            self.out_degree(j)
        }
    }

    fn preferential_attachment(&self, pair: Pair) -> f64 {
        (self.out_degree(pair.i) * self.target_degree(pair.j)) as f64
    }

    /// `(A²)_ij`: walks `i → u → j`.
    fn paths2(&self, pair: Pair) -> usize {
        count_common(self.out(pair.i), self.inn(pair.j))
    }

    /// `(A³)_ij = Σ_{u ∈ out(i)} |out(u) ∩ in(j)|`.
    fn paths3(&self, pair: Pair) -> usize {
        self.out(pair.i)
            .map(|u| count_common(self.out(u), self.inn(pair.j)))
            .sum()
    }

    pub(crate) fn features(&self, pair: Pair) -> FeatureVector {
        FeatureVector([
            self.out_degree(pair.i) as f64,
            self.target_degree(pair.j) as f64,
            self.cn(pair) as f64,
            self.jaccard(pair),
            self.adamic_adar(pair),
            self.paths2(pair) as f64,
            self.paths3(pair) as f64,
            self.preferential_attachment(pair),
        ])
    }
}

/// Number of common neighbors, `A_{i,•}ᵀ A_{j,•}`.
pub fn cn_score(graph: &ObservedGraph, pair: Pair) -> f64 {
    AdjView::new(graph).cn(pair) as f64
}

/// `|N(i) ∩ N(j)| / |N(i) ∪ N(j)|`, 0 when both neighborhoods are empty.
pub fn jaccard(graph: &ObservedGraph, pair: Pair) -> f64 {
    AdjView::new(graph).jaccard(pair)
}

/// `Σ 1 / ln deg(u)` over common neighbors `u`; terms with `deg(u) <= 1` are
/// skipped.
pub fn adamic_adar(graph: &ObservedGraph, pair: Pair) -> f64 {
    AdjView::new(graph).adamic_adar(pair)
}

/// `Σ 1 / deg(u)` over common neighbors `u`.
pub fn resource_allocation(graph: &ObservedGraph, pair: Pair) -> f64 {
    AdjView::new(graph).resource_allocation(pair)
}

/// `deg(i) · deg(j)` (out-degree times in-degree when directed).
pub fn preferential_attachment(graph: &ObservedGraph, pair: Pair) -> f64 {
    AdjView::new(graph).preferential_attachment(pair)
}

pub const FEATURE_NAMES: [&str; 8] = [
    "deg_i",
    "deg_j",
    "common_neighbors",
    "jaccard",
    "adamic_adar",
    "paths2",
    "paths3",
    "preferential_attachment",
];

/// Permutation-invariant summary of the 3-hop neighborhood of a pair, in the
/// order of [`FEATURE_NAMES`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector(pub [f64; 8]);

impl FeatureVector {
    pub const DIM: usize = 8;

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn common_neighbors(&self) -> f64 {
        self.0[2]
    }
}

pub fn extract_features(graph: &ObservedGraph, pair: Pair) -> FeatureVector {
    AdjView::new(graph).features(pair)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::{p, toy};
    use crate::graph::GraphBuilder;
    use proptest::prelude::*;

    #[test]
    fn toy_heuristics() {
        let g = toy();
        assert_eq!(cn_score(&g, p(2, 4)), 1.0);
        assert_eq!(cn_score(&g, p(3, 4)), 0.0);
        assert!((jaccard(&g, p(2, 4)) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(preferential_attachment(&g, p(2, 4)), 3.0);
        // common neighbor of 2 and 4 is node 1, of degree 2
        assert!((adamic_adar(&g, p(2, 4)) - 1.0 / 2f64.ln()).abs() < 1e-15);
        assert!((resource_allocation(&g, p(2, 4)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn toy_features() {
        let f = extract_features(&toy(), p(2, 4));
        assert_eq!(f.0[0], 3.0);
        assert_eq!(f.0[1], 1.0);
        assert_eq!(f.common_neighbors(), 1.0);
        assert_eq!(f.0[5], 1.0);
        // 3-walks 2→u→1→4 need u ∈ N(2) ∩ N(1), which is empty.
        assert_eq!(f.0[6], 0.0);
    }

    #[test]
    fn empty_graph_scores_zero() {
        let g = GraphBuilder::new(4, false).build().unwrap();
        let pair = Pair::new(0, 2);
        assert_eq!(cn_score(&g, pair), 0.0);
        assert_eq!(jaccard(&g, pair), 0.0);
        assert_eq!(extract_features(&g, pair).0, [0.0; 8]);
    }

    #[test]
    fn direct_edge_is_not_a_two_path() {
        let g = GraphBuilder::new(3, false)
            .edge(0, 1)
            .edge(1, 2)
            .edge(0, 2)
            .build()
            .unwrap();
        let f = extract_features(&g, Pair::new(0, 1));
        assert_eq!(f.0[5], 1.0);
        let without = AdjView::without_edge(&g, Pair::new(1, 0)).features(Pair::new(0, 1));
        assert_eq!(without.0[0], 1.0);
        assert_eq!(without.0[1], 1.0);
        assert_eq!(without.0[5], 1.0);
        assert_eq!(f.0[6], brute_power(&g, 3, 0, 1) as f64);
        let removed = GraphBuilder::new(3, false)
            .edge(1, 2)
            .edge(0, 2)
            .build()
            .unwrap();
        assert_eq!(without, extract_features(&removed, Pair::new(0, 1)));
    }

    #[test]
    fn self_pair_cn_is_degree() {
        let g = toy();
        assert_eq!(cn_score(&g, p(2, 2)), 3.0);
    }

    fn dense(g: &ObservedGraph) -> Vec<Vec<u64>> {
        let n = g.n();
        let mut a = vec![vec![0; n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = g.has_edge(Pair::new(i, j)) as u64;
            }
        }
        a
    }

    fn brute_power(g: &ObservedGraph, k: usize, i: usize, j: usize) -> u64 {
        let a = dense(g);
        let n = g.n();
        let mut cur = a.clone();
        for _ in 1..k {
            let mut next = vec![vec![0; n]; n];
            for r in 0..n {
                for c in 0..n {
                    next[r][c] = (0..n).map(|m| cur[r][m] * a[m][c]).sum();
                }
            }
            cur = next;
        }
        cur[i][j]
    }

    fn arb_graph() -> impl Strategy<Value = ObservedGraph> {
        (
            2usize..12,
            any::<bool>(),
            proptest::collection::vec((0usize..12, 0usize..12), 0..40),
        )
            .prop_map(|(n, directed, raw)| {
                let edges = raw.into_iter().map(|(a, b)| (a % n, b % n));
                GraphBuilder::new(n, directed).edges(edges).build().unwrap()
            })
    }

    proptest! {
        #[test]
        fn cn_matches_brute_force(g in arb_graph()) {
            let a = dense(&g);
            for pair in g.pairs() {
                let (i, j) = (pair.i.index(), pair.j.index());
                let brute: u64 = (0..g.n()).map(|u| a[i][u] * a[j][u]).sum();
                prop_assert_eq!(cn_score(&g, pair), brute as f64);
                let f = extract_features(&g, pair);
                prop_assert_eq!(f.0[5], brute_power(&g, 2, i, j) as f64);
                prop_assert_eq!(f.0[6], brute_power(&g, 3, i, j) as f64);
            }
        }

        #[test]
        fn heuristics_are_relabeling_equivariant(g in arb_graph(), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            let mut perm: Vec<usize> = (0..g.n()).collect();
            perm.shuffle(&mut crate::rng::stream(seed));
            let relabeled = GraphBuilder::new(g.n(), g.is_directed())
                .edges(g.edges().map(|e| (perm[e.i.index()], perm[e.j.index()])))
                .build()
                .unwrap();
            for pair in g.pairs() {
                let mapped = Pair::new(perm[pair.i.index()], perm[pair.j.index()]);
                let before = extract_features(&g, pair);
                let after = extract_features(&relabeled, mapped);
                for (x, y) in before.0.iter().zip(after.0.iter()) {
                    prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
                }
            }
        }

        #[test]
        fn undirected_queries_are_symmetric(g in arb_graph()) {
            prop_assume!(!g.is_directed());
            for pair in g.pairs() {
                let r = pair.reversed();
                prop_assert_eq!(cn_score(&g, pair), cn_score(&g, r));
                prop_assert_eq!(jaccard(&g, pair), jaccard(&g, r));
                prop_assert_eq!(adamic_adar(&g, pair), adamic_adar(&g, r));
                prop_assert_eq!(g.has_edge(pair), g.has_edge(r));
                prop_assert_eq!(g.is_sampled(pair), g.is_sampled(r));
            }
        }
    }
}
