//! Directed, vote-weighted pairwise comparison graphs.
//!
//! Raw annotator records are aggregated into at most one edge per ordered
//! pair, with the edge weight counting the votes for that direction. Edges
//! are kept sorted by `(src, dst)` so that every matrix and path derived
//! from a graph has a stable row order across runs and platforms.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = usize;

/// One pairwise vote: the annotator preferred `preferred` over `other`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub preferred: NodeId,
    pub other: NodeId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotator: Option<String>,
}

impl AnnotationRecord {
    pub fn new(preferred: NodeId, other: NodeId) -> Self {
        Self {
            preferred,
            other,
            annotator: None,
        }
    }
}

/// Directed edge `src -> dst` carrying the number of votes for `src` over `dst`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
    pub weight: u64,
}

/// Vote-weighted directed comparison graph.
///
/// Both directions of a pair may coexist (annotators disagreed); weights are
/// always >= 1 and self-loops are rejected at construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonGraph {
    n_nodes: usize,
    edges: Vec<Edge>,
}

impl ComparisonGraph {
    /// Aggregate raw records into a graph with `n_nodes` nodes.
    ///
    /// Duplicate ordered pairs are merged by summing votes. Fails on
    /// self-loops and out-of-range ids, naming the offending record index.
    pub fn build(records: &[AnnotationRecord], n_nodes: usize) -> Result<Self> {
        let mut counts: BTreeMap<(NodeId, NodeId), u64> = BTreeMap::new();
        for (index, rec) in records.iter().enumerate() {
            if rec.preferred == rec.other {
                return Err(Error::SelfLoop {
                    index,
                    node: rec.preferred,
                });
            }
            for node in [rec.preferred, rec.other] {
                if node >= n_nodes {
                    return Err(Error::NodeOutOfRange {
                        index,
                        node,
                        n_nodes,
                    });
                }
            }
            *counts.entry((rec.preferred, rec.other)).or_insert(0) += 1;
        }
        let edges = counts
            .into_iter()
            .map(|((src, dst), weight)| Edge { src, dst, weight })
            .collect();
        Ok(Self { n_nodes, edges })
    }

    /// Build directly from `(src, dst, weight)` triples; duplicates merge.
    pub fn from_edges<I>(n_nodes: usize, triples: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId, u64)>,
    {
        let mut counts: BTreeMap<(NodeId, NodeId), u64> = BTreeMap::new();
        for (index, (src, dst, weight)) in triples.into_iter().enumerate() {
            if src == dst {
                return Err(Error::SelfLoop { index, node: src });
            }
            for node in [src, dst] {
                if node >= n_nodes {
                    return Err(Error::NodeOutOfRange {
                        index,
                        node,
                        n_nodes,
                    });
                }
            }
            if weight == 0 {
                return Err(Error::InvalidConfig(format!(
                    "edge {index}: weight must be >= 1"
                )));
            }
            *counts.entry((src, dst)).or_insert(0) += weight;
        }
        let edges = counts
            .into_iter()
            .map(|((src, dst), weight)| Edge { src, dst, weight })
            .collect();
        Ok(Self { n_nodes, edges })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges in the canonical `(src, dst)` order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Index of the edge `src -> dst` in canonical order, if present.
    pub fn edge_index(&self, src: NodeId, dst: NodeId) -> Option<usize> {
        self.edges
            .binary_search_by_key(&(src, dst), |e| (e.src, e.dst))
            .ok()
    }

    /// Total number of votes (sum of edge weights).
    pub fn total_votes(&self) -> u64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Per-edge weights as floats, in canonical edge order.
    pub fn weights(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.weight as f64).collect()
    }

    /// Keep, for each unordered pair, only the direction with strictly more
    /// votes. Ties carry no majority signal and drop both directions.
    pub fn majority_vote_filter(&self) -> ComparisonGraph {
        let mut pairs: BTreeMap<(NodeId, NodeId), (u64, u64)> = BTreeMap::new();
        for e in &self.edges {
            let key = (e.src.min(e.dst), e.src.max(e.dst));
            let slot = pairs.entry(key).or_insert((0, 0));
            if e.src < e.dst {
                slot.0 = e.weight;
            } else {
                slot.1 = e.weight;
            }
        }
        let mut edges = Vec::new();
        for ((lo, hi), (fwd, rev)) in pairs {
            if fwd > rev {
                edges.push(Edge {
                    src: lo,
                    dst: hi,
                    weight: fwd,
                });
            } else if rev > fwd {
                edges.push(Edge {
                    src: hi,
                    dst: lo,
                    weight: rev,
                });
            }
        }
        edges.sort_by_key(|e| (e.src, e.dst));
        ComparisonGraph {
            n_nodes: self.n_nodes,
            edges,
        }
    }

    /// Weakly connected components, each sorted, ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<NodeId>> {
        let mut adjacency: Vec<Vec<NodeId>> = vec![Vec::new(); self.n_nodes];
        for e in &self.edges {
            adjacency[e.src].push(e.dst);
            adjacency[e.dst].push(e.src);
        }
        let mut seen = vec![false; self.n_nodes];
        let mut components = Vec::new();
        for start in 0..self.n_nodes {
            if seen[start] {
                continue;
            }
            let mut component = Vec::new();
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(node) = stack.pop() {
                component.push(node);
                for &next in &adjacency[node] {
                    if !seen[next] {
                        seen[next] = true;
                        stack.push(next);
                    }
                }
            }
            component.sort_unstable();
            components.push(component);
        }
        components
    }

    /// Edge-by-node incidence matrix: +1 at the edge source, -1 at the target.
    pub fn incidence_matrix(&self) -> IncidenceMatrix {
        IncidenceMatrix {
            n_nodes: self.n_nodes,
            rows: self.edges.iter().map(|e| (e.src, e.dst)).collect(),
        }
    }
}

/// Sparse incidence matrix of a comparison graph.
///
/// Row k corresponds to edge k in the graph's canonical order and holds
/// exactly one +1 (source) and one -1 (target).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    n_nodes: usize,
    rows: Vec<(NodeId, NodeId)>,
}

impl IncidenceMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_nodes
    }

    /// `(source, target)` columns of row `k`.
    pub fn row(&self, k: usize) -> (NodeId, NodeId) {
        self.rows[k]
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows.len(), self.n_nodes);
        for (k, &(src, dst)) in self.rows.iter().enumerate() {
            m[(k, src)] = 1.0;
            m[(k, dst)] = -1.0;
        }
        m
    }

    /// `C v` for a node vector `v`.
    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.rows.len(),
            self.rows.iter().map(|&(src, dst)| v[src] - v[dst]),
        )
    }

    /// `C^T u` for an edge vector `u`.
    pub fn apply_transpose(&self, u: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.n_nodes);
        for (k, &(src, dst)) in self.rows.iter().enumerate() {
            out[src] += u[k];
            out[dst] -= u[k];
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn records(pairs: &[(usize, usize)]) -> Vec<AnnotationRecord> {
        pairs
            .iter()
            .map(|&(a, b)| AnnotationRecord::new(a, b))
            .collect()
    }

    /// Row-reduction rank over f64, independent of any linear algebra crate.
    fn gaussian_rank(mut m: Vec<Vec<f64>>) -> usize {
        let rows = m.len();
        if rows == 0 {
            return 0;
        }
        let cols = m[0].len();
        let mut rank = 0;
        let mut row = 0;
        for col in 0..cols {
            let pivot = (row..rows).max_by(|&a, &b| {
                m[a][col]
                    .abs()
                    .partial_cmp(&m[b][col].abs())
                    .unwrap()
            });
            let Some(pivot) = pivot else { break };
            if m[pivot][col].abs() < 1e-9 {
                continue;
            }
            m.swap(row, pivot);
            for r in 0..rows {
                if r != row && m[r][col].abs() > 0.0 {
                    let factor = m[r][col] / m[row][col];
                    for c in 0..cols {
                        m[r][c] -= factor * m[row][c];
                    }
                }
            }
            rank += 1;
            row += 1;
            if row == rows {
                break;
            }
        }
        rank
    }

    fn dense_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
            .collect()
    }

    /// Fig-2a style fixture: 4 chain pairs split 2/1 toward the true order,
    /// plus the A-E pair split 2/1 toward the wrong direction.
    pub(crate) fn condorcet_a() -> ComparisonGraph {
        ComparisonGraph::from_edges(
            5,
            [
                (1, 0, 2),
                (0, 1, 1),
                (2, 1, 2),
                (1, 2, 1),
                (3, 2, 2),
                (2, 3, 1),
                (4, 3, 2),
                (3, 4, 1),
                (0, 4, 2),
                (4, 0, 1),
            ],
        )
        .unwrap()
    }

    #[test]
    fn build_counts_votes_per_direction() {
        let g = ComparisonGraph::build(&records(&[(0, 1), (0, 1), (1, 0)]), 2).unwrap();
        assert_eq!(g.n_nodes(), 2);
        assert_eq!(
            g.edges(),
            &[
                Edge {
                    src: 0,
                    dst: 1,
                    weight: 2
                },
                Edge {
                    src: 1,
                    dst: 0,
                    weight: 1
                }
            ]
        );
    }

    #[test]
    fn build_empty_records() {
        let g = ComparisonGraph::build(&[], 3).unwrap();
        assert_eq!(g.n_nodes(), 3);
        assert_eq!(g.n_edges(), 0);
    }

    #[test]
    fn build_rejects_self_loop_with_index() {
        let err = ComparisonGraph::build(&records(&[(0, 1), (2, 2)]), 3).unwrap_err();
        match err {
            Error::SelfLoop { index, node } => {
                assert_eq!(index, 1);
                assert_eq!(node, 2);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn build_rejects_out_of_range_id() {
        let err = ComparisonGraph::build(&records(&[(0, 5)]), 3).unwrap_err();
        match err {
            Error::NodeOutOfRange {
                index,
                node,
                n_nodes,
            } => {
                assert_eq!((index, node, n_nodes), (0, 5, 3));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn build_is_permutation_invariant_and_conserves_votes() {
        let base = [(0, 1), (2, 1), (0, 1), (3, 0), (1, 2), (0, 1)];
        let g1 = ComparisonGraph::build(&records(&base), 4).unwrap();
        let mut shuffled = base;
        shuffled.reverse();
        shuffled.swap(1, 4);
        let g2 = ComparisonGraph::build(&records(&shuffled), 4).unwrap();
        assert_eq!(g1, g2);
        assert_eq!(g1.total_votes(), base.len() as u64);
    }

    #[test]
    fn condorcet_a_has_ten_edges_with_two_one_splits() {
        let g = condorcet_a();
        assert_eq!(g.n_edges(), 10);
        for pair in [(0, 1), (1, 2), (2, 3), (3, 4)] {
            let fwd = g.edge_index(pair.0, pair.1).unwrap();
            let rev = g.edge_index(pair.1, pair.0).unwrap();
            assert_eq!(g.edges()[fwd].weight, 1, "minority vote for {pair:?}");
            assert_eq!(g.edges()[rev].weight, 2, "majority vote for {pair:?}");
        }
        assert_eq!(g.edges()[g.edge_index(0, 4).unwrap()].weight, 2);
        assert_eq!(g.edges()[g.edge_index(4, 0).unwrap()].weight, 1);
    }

    #[test]
    fn incidence_single_edge() {
        let g = ComparisonGraph::from_edges(2, [(0, 1, 1)]).unwrap();
        let c = g.incidence_matrix().to_dense();
        assert_eq!(c.nrows(), 1);
        assert_eq!(c[(0, 0)], 1.0);
        assert_eq!(c[(0, 1)], -1.0);
    }

    #[test]
    fn incidence_triangle_rank_is_nodes_minus_one() {
        let g = ComparisonGraph::from_edges(3, [(0, 1, 1), (1, 2, 1), (2, 0, 1)]).unwrap();
        let c = g.incidence_matrix().to_dense();
        assert_eq!(gaussian_rank(dense_rows(&c)), 2);
    }

    #[test]
    fn incidence_condorcet_a_rank_four() {
        let g = condorcet_a();
        let c = g.incidence_matrix().to_dense();
        assert_eq!(c.nrows(), 10);
        assert_eq!(c.ncols(), 5);
        assert_eq!(gaussian_rank(dense_rows(&c)), 4);
    }

    #[test]
    fn incidence_rows_sum_to_zero_exactly() {
        let g = condorcet_a();
        let c = g.incidence_matrix();
        let ones = DVector::from_element(5, 1.0);
        let sums = c.apply(&ones);
        assert!(sums.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn incidence_component_rank_matches_size_minus_one() {
        // Two components: {0,1,2} wired with 3 edges, {3,4} with 1 edge.
        let g =
            ComparisonGraph::from_edges(5, [(0, 1, 1), (1, 2, 2), (2, 0, 1), (3, 4, 3)]).unwrap();
        let dense = g.incidence_matrix().to_dense();
        for component in g.connected_components() {
            let rows: Vec<Vec<f64>> = (0..g.n_edges())
                .filter(|&k| component.contains(&g.edges()[k].src))
                .map(|k| component.iter().map(|&n| dense[(k, n)]).collect())
                .collect();
            assert_eq!(gaussian_rank(rows), component.len() - 1);
        }
    }

    #[test]
    fn majority_filter_keeps_strict_winner() {
        let g = ComparisonGraph::from_edges(2, [(0, 1, 3), (1, 0, 1)]).unwrap();
        let filtered = g.majority_vote_filter();
        assert_eq!(
            filtered.edges(),
            &[Edge {
                src: 0,
                dst: 1,
                weight: 3
            }]
        );
    }

    #[test]
    fn majority_filter_drops_ties() {
        let g = ComparisonGraph::from_edges(2, [(0, 1, 2), (1, 0, 2)]).unwrap();
        assert_eq!(g.majority_vote_filter().n_edges(), 0);
    }

    #[test]
    fn majority_filter_retains_wrong_direction_on_condorcet_a() {
        let filtered = condorcet_a().majority_vote_filter();
        assert_eq!(filtered.n_edges(), 5);
        // The locally-majority but globally inconsistent direction survives.
        assert!(filtered.edge_index(0, 4).is_some());
        assert!(filtered.edge_index(4, 0).is_none());
        for (src, dst) in [(1, 0), (2, 1), (3, 2), (4, 3)] {
            assert!(filtered.edge_index(src, dst).is_some());
        }
    }

    #[test]
    fn majority_filter_one_edge_per_unordered_pair() {
        let g = condorcet_a().majority_vote_filter();
        let mut pairs: Vec<_> = g
            .edges()
            .iter()
            .map(|e| (e.src.min(e.dst), e.src.max(e.dst)))
            .collect();
        pairs.dedup();
        assert_eq!(pairs.len(), g.n_edges());
    }

    #[test]
    fn components_examples() {
        let g = ComparisonGraph::from_edges(3, [(0, 1, 1)]).unwrap();
        assert_eq!(g.connected_components(), vec![vec![0, 1], vec![2]]);

        let complete4 = ComparisonGraph::from_edges(
            4,
            (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j, 1))),
        )
        .unwrap();
        assert_eq!(complete4.connected_components(), vec![vec![0, 1, 2, 3]]);

        let empty = ComparisonGraph::build(&[], 2).unwrap();
        assert_eq!(empty.connected_components(), vec![vec![0], vec![1]]);
    }
}
