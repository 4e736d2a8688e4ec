//! Immutable bipartite graphs with butterfly and caterpillar statistics.
//!
//! A butterfly is a complete 2x2 biclique: two left nodes and two right nodes
//! with all four cross edges present. The fast counters go through shared
//! neighborhood sizes; [`BipartiteGraph::butterfly_count_oracle`] enumerates
//! quadruples literally and is kept as an independent cross-check, never used
//! by the fast path.

use std::collections::{HashMap, HashSet};
use std::hash::{Hash, Hasher};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("edge ({u}, {a}) out of range for {left} left / {right} right nodes")]
    IdOutOfRange {
        u: usize,
        a: usize,
        left: usize,
        right: usize,
    },
    #[error("node pair must be distinct, got {0} twice")]
    SameNode(usize),
}

/// Left and right degree sequences, indexed by node id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreePair {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

impl DegreePair {
    pub fn new(left: Vec<usize>, right: Vec<usize>) -> Self {
        DegreePair { left, right }
    }

    /// Sum of left degrees; equals the edge count when the pair is realizable.
    pub fn left_sum(&self) -> usize {
        self.left.iter().sum()
    }

    pub fn right_sum(&self) -> usize {
        self.right.iter().sum()
    }
}

/// A labeled bipartite graph with 0-based left and right node ids.
///
/// Edges are stored sorted by (left, right), so [`BipartiteGraph::edges`] is a
/// deterministic canonical order for a given labeled graph. Values are
/// immutable after construction.
#[derive(Debug, Clone)]
pub struct BipartiteGraph {
    left_count: usize,
    right_count: usize,
    edges: Vec<(usize, usize)>,
    edge_set: HashSet<(usize, usize)>,
    left_adj: Vec<Vec<usize>>,
    right_adj: Vec<Vec<usize>>,
}

impl PartialEq for BipartiteGraph {
    fn eq(&self, other: &Self) -> bool {
        self.left_count == other.left_count
            && self.right_count == other.right_count
            && self.edges == other.edges
    }
}

impl Eq for BipartiteGraph {}

impl Hash for BipartiteGraph {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.left_count.hash(state);
        self.right_count.hash(state);
        self.edges.hash(state);
    }
}

/// `k * (k - 1) / 2`, with the convention that values below 2 give 0.
pub fn choose2(k: usize) -> u64 {
    let k = k as u64;
    k * k.saturating_sub(1) / 2
}

impl BipartiteGraph {
    /// Builds a graph, rejecting out-of-range ids and duplicate edges.
    pub fn new(
        left_count: usize,
        right_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut sorted: Vec<(usize, usize)> = edges.into_iter().collect();
        sorted.sort_unstable();
        let mut edge_set = HashSet::with_capacity(sorted.len());
        let mut left_adj = vec![Vec::new(); left_count];
        let mut right_adj = vec![Vec::new(); right_count];
        for &(u, a) in &sorted {
            if u >= left_count || a >= right_count {
                return Err(GraphError::IdOutOfRange {
                    u,
                    a,
                    left: left_count,
                    right: right_count,
                });
            }
            if !edge_set.insert((u, a)) {
                return Err(GraphError::DuplicateEdge(u, a));
            }
            left_adj[u].push(a);
            right_adj[a].push(u);
        }
        // Edges are sorted, so the adjacency lists come out sorted as well.
        Ok(BipartiteGraph {
            left_count,
            right_count,
            edges: sorted,
            edge_set,
            left_adj,
            right_adj,
        })
    }

    pub fn left_count(&self) -> usize {
        self.left_count
    }

    pub fn right_count(&self) -> usize {
        self.right_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges sorted by (left, right).
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, a: usize) -> bool {
        self.edge_set.contains(&(u, a))
    }

    /// Sorted right neighbors of left node `u`.
    pub fn left_neighbors(&self, u: usize) -> &[usize] {
        &self.left_adj[u]
    }

    /// Sorted left neighbors of right node `a`.
    pub fn right_neighbors(&self, a: usize) -> &[usize] {
        &self.right_adj[a]
    }

    pub fn left_degree(&self, u: usize) -> usize {
        self.left_adj[u].len()
    }

    pub fn right_degree(&self, a: usize) -> usize {
        self.right_adj[a].len()
    }

    pub fn degree_sequences(&self) -> DegreePair {
        DegreePair {
            left: self.left_adj.iter().map(Vec::len).collect(),
            right: self.right_adj.iter().map(Vec::len).collect(),
        }
    }

    /// The same graph with left and right sides exchanged.
    pub fn transposed(&self) -> BipartiteGraph {
        let flipped = self.edges.iter().map(|&(u, a)| (a, u));
        BipartiteGraph::new(self.right_count, self.left_count, flipped)
            .expect("transposing a valid graph cannot fail")
    }

    /// Number of common neighbors of two distinct left nodes.
    pub fn shared_left_neighbors(&self, u: usize, v: usize) -> Result<usize, GraphError> {
        if u == v {
            return Err(GraphError::SameNode(u));
        }
        Ok(intersection_size(&self.left_adj[u], &self.left_adj[v]))
    }

    /// Number of common neighbors of two distinct right nodes.
    pub fn shared_right_neighbors(&self, a: usize, b: usize) -> Result<usize, GraphError> {
        if a == b {
            return Err(GraphError::SameNode(a));
        }
        Ok(intersection_size(&self.right_adj[a], &self.right_adj[b]))
    }

    /// Number of butterflies both `u` and `v` belong to: C(shared, 2).
    pub fn butterflies_pair(&self, u: usize, v: usize) -> Result<u64, GraphError> {
        Ok(choose2(self.shared_left_neighbors(u, v)?))
    }

    /// Number of butterflies left node `u` belongs to.
    pub fn butterflies_node(&self, u: usize) -> u64 {
        let mut shared: HashMap<usize, usize> = HashMap::new();
        for &a in &self.left_adj[u] {
            for &v in &self.right_adj[a] {
                if v != u {
                    *shared.entry(v).or_insert(0) += 1;
                }
            }
        }
        shared.values().map(|&c| choose2(c)).sum()
    }

    /// Total number of butterflies, via shared-neighbor counts over pairs of
    /// the smaller side.
    pub fn butterfly_count(&self) -> u64 {
        if self.left_count <= self.right_count {
            pair_cooccurrence_butterflies(&self.right_adj)
        } else {
            pair_cooccurrence_butterflies(&self.left_adj)
        }
    }

    /// Butterfly count by literal enumeration of all {u, v, a, b} quadruples.
    ///
    /// Quadratic in both sides; intended for small graphs and as an
    /// independent cross-check of [`BipartiteGraph::butterfly_count`].
    pub fn butterfly_count_oracle(&self) -> u64 {
        let mut count = 0u64;
        for u in 0..self.left_count {
            for v in (u + 1)..self.left_count {
                for a in 0..self.right_count {
                    for b in (a + 1)..self.right_count {
                        if self.has_edge(u, a)
                            && self.has_edge(u, b)
                            && self.has_edge(v, a)
                            && self.has_edge(v, b)
                        {
                            count += 1;
                        }
                    }
                }
            }
        }
        count
    }

    /// Number of caterpillars (3-edge paths): sum over edges (u, a) of
    /// (d(u) - 1) * (d(a) - 1), each path counted once at its middle edge.
    pub fn caterpillar_count(&self) -> u64 {
        self.edges
            .iter()
            .map(|&(u, a)| {
                (self.left_adj[u].len() as u64 - 1) * (self.right_adj[a].len() as u64 - 1)
            })
            .sum()
    }

    /// Relabels nodes: `left_perm[u]` is the new id of left node `u`, same for
    /// the right side. Permutations must be bijections of the node ranges.
    pub fn relabeled(&self, left_perm: &[usize], right_perm: &[usize]) -> BipartiteGraph {
        assert_eq!(left_perm.len(), self.left_count, "left permutation length");
        assert_eq!(right_perm.len(), self.right_count, "right permutation length");
        let edges = self.edges.iter().map(|&(u, a)| (left_perm[u], right_perm[a]));
        BipartiteGraph::new(self.left_count, self.right_count, edges)
            .expect("relabeling a valid graph cannot fail")
    }
}

fn intersection_size(xs: &[usize], ys: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < xs.len() && j < ys.len() {
        match xs[i].cmp(&ys[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Total butterflies seen from one side: every list in `opposite_adj` marks
/// one shared neighbor for each pair it contains.
fn pair_cooccurrence_butterflies(opposite_adj: &[Vec<usize>]) -> u64 {
    let mut shared: HashMap<(usize, usize), usize> = HashMap::new();
    for nbrs in opposite_adj {
        for (i, &u) in nbrs.iter().enumerate() {
            for &v in &nbrs[i + 1..] {
                *shared.entry((u, v)).or_insert(0) += 1;
            }
        }
    }
    shared.values().map(|&c| choose2(c)).sum()
}

/// Random bipartite graph where each of the `left * right` possible edges is
/// present independently with probability `density`.
pub fn random_bipartite<R: Rng + ?Sized>(
    left: usize,
    right: usize,
    density: f64,
    rng: &mut R,
) -> BipartiteGraph {
    let mut edges = Vec::new();
    for u in 0..left {
        for a in 0..right {
            if rng.random_bool(density) {
                edges.push((u, a));
            }
        }
    }
    BipartiteGraph::new(left, right, edges).expect("generated edges are in range and distinct")
}

/// Complete bipartite graph K_{left,right}.
pub fn complete_bipartite(left: usize, right: usize) -> BipartiteGraph {
    let edges = (0..left).flat_map(|u| (0..right).map(move |a| (u, a)));
    BipartiteGraph::new(left, right, edges).expect("complete graph edges are valid")
}
