//! Generator for pairs of graphs that demonstrate how large swap moves must
//! get.
//!
//! Given naturals s != t >= 2, [`construct_pair`] builds two bipartite graphs
//! G_b ("begin") and G_e ("end") on the same node sets with identical left
//! and right degree sequences and the same butterfly count n + C(n, 2) where
//! n = C(s, 2) + C(t, 2), yet no sequence of butterfly-preserving swaps can
//! turn one into the other without at least one swap of size
//! 2 * (max(s, t) - 1). In G_b the butterflies are spread over three left
//! pairs; in G_e they all sit on one pair.
//!
//! Node indexing follows the construction recipe one-based (x_1.., y_1..),
//! mapped to 0-based ids by subtracting one, so every edge below can be read
//! off against the recipe line by line.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon::are_isomorphic;
use crate::graph::{choose2, BipartiteGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error("parameters must satisfy s != t and s, t >= 2; got s = {s}, t = {t}")]
    InvalidParams { s: usize, t: usize },
}

/// The constructed pair together with its parameters.
#[derive(Debug, Clone)]
pub struct ConstructionPair {
    pub s: usize,
    pub t: usize,
    /// n = C(s, 2) + C(t, 2).
    pub n: usize,
    /// Number of padding nodes: s + t - 2, plus one per even input.
    pub add: usize,
    pub g_begin: BipartiteGraph,
    pub g_end: BipartiteGraph,
}

impl ConstructionPair {
    /// Target butterfly count for both graphs: n + C(n, 2) = C(n + 1, 2).
    pub fn expected_butterflies(&self) -> u64 {
        self.n as u64 + choose2(self.n)
    }
}

/// Lower bound on the largest swap needed to connect a pair built with the
/// given larger parameter: 2 * (s - 1).
pub fn min_qbar_for(s: usize) -> usize {
    2 * (s - 1)
}

pub fn construct_pair(s: usize, t: usize) -> Result<ConstructionPair, ConstructError> {
    if s == t || s < 2 || t < 2 {
        return Err(ConstructError::InvalidParams { s, t });
    }
    let n = (choose2(s) + choose2(t)) as usize;
    let mut add = s + t - 2;
    if s % 2 == 0 {
        add += 1;
    }
    if t % 2 == 0 {
        add += 1;
    }
    let left_count = 7 + add;
    let right_count = s + t + n + 2 + add;

    // One-based node helpers, mirroring the x_i / y_j notation.
    let x = |i: usize| i - 1;
    let y = |j: usize| j - 1;

    let mut eb: Vec<(usize, usize)> = Vec::new();
    // butterflies between x1 and x2
    for l in 1..=s {
        eb.push((x(1), y(l)));
        eb.push((x(2), y(l)));
    }
    // butterflies between x3 and x4
    for l in 1..=t {
        eb.push((x(3), y(s + l)));
        eb.push((x(4), y(s + l)));
    }
    // butterflies between x5 and x6
    for l in 1..=n {
        eb.push((x(5), y(s + t + l)));
        eb.push((x(6), y(s + t + l)));
    }
    // x5 and x6 reach degree n+1; y_{s+t+n+1} reaches degree 2
    eb.push((x(5), y(s + t + n + 1)));
    eb.push((x(6), y(s + t + n + 2)));
    eb.push((x(7), y(s + t + n + 1)));
    // auxiliary isolated edges
    for l in 1..=add {
        eb.push((x(7 + l), y(s + t + n + 2 + l)));
    }

    let mut ee: Vec<(usize, usize)> = Vec::new();
    // butterflies between x5 and x6 only
    for l in 1..=(n + 1) {
        ee.push((x(5), y(s + t + l)));
        ee.push((x(6), y(s + t + l)));
    }
    // x1/x2 and x3/x4 each share exactly one neighbor
    ee.push((x(1), y(1)));
    ee.push((x(2), y(1)));
    ee.push((x(3), y(s + 1)));
    ee.push((x(4), y(s + 1)));
    let h1 = (s - 1) / 2;
    let h2 = (t - 1) / 2;
    // split s-1 right nodes between x1 and x2
    for l in 1..=h1 {
        ee.push((x(1), y(1 + l)));
        ee.push((x(2), y(1 + h1 + l)));
    }
    // split t-1 right nodes between x3 and x4
    for l in 1..=h2 {
        ee.push((x(3), y(s + 1 + l)));
        ee.push((x(4), y(s + 1 + h2 + l)));
    }
    // top the degrees of x1, x2 up to s and of x3, x4 up to t
    let a1 = s - (1 + h1);
    let a2 = t - (1 + h2);
    for l in 1..=a1 {
        ee.push((x(1), y(s + t + n + 2 + l)));
        ee.push((x(2), y(s + t + n + 2 + a1 + l)));
    }
    for l in 1..=a2 {
        ee.push((x(3), y(s + t + n + 2 + 2 * a1 + l)));
        ee.push((x(4), y(s + t + n + 2 + 2 * a1 + a2 + l)));
    }
    // x7 and y_{s+t+n+2} have degree 1
    ee.push((x(7), y(s + t + n + 2)));
    // the first s+t right nodes must reach degree 2
    for l in 1..=(s - 1) {
        ee.push((x(7 + l), y(1 + l)));
    }
    for l in 1..=(t - 1) {
        ee.push((x(7 + s - 1 + l), y(s + 1 + l)));
    }
    let mut tail = 0;
    if s % 2 == 0 {
        ee.push((x(7 + s + t - 1), y(s)));
        tail += 1;
    }
    if t % 2 == 0 {
        ee.push((x(7 + s + t - 1 + tail), y(s + t)));
    }

    let g_begin = BipartiteGraph::new(left_count, right_count, eb)
        .expect("begin-graph edges are in range and distinct");
    let g_end = BipartiteGraph::new(left_count, right_count, ee)
        .expect("end-graph edges are in range and distinct");
    Ok(ConstructionPair {
        s,
        t,
        n,
        add,
        g_begin,
        g_end,
    })
}

/// Pass/fail record for the structural properties of a constructed pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstructionReport {
    pub s: usize,
    pub t: usize,
    pub n: usize,
    pub add: usize,
    pub left_count: usize,
    pub right_count: usize,
    pub edge_count_begin: usize,
    pub edge_count_end: usize,
    pub butterflies_begin: u64,
    pub butterflies_end: u64,
    pub expected_butterflies: u64,
    /// Node counts produced by the construction: 7 + add left nodes.
    pub node_counts_match_construction: bool,
    /// Left-node count under the alternative `7 + parity(s) + parity(t)`
    /// formula, recorded for comparison; the construction's count is the one
    /// checked.
    pub alternative_left_count: usize,
    /// Indexed degree equality between the two graphs plus the stated roles:
    /// x1, x2 of degree s; x3, x4 of degree t; x5, x6 of degree n + 1; the
    /// first s + t + n + 1 right nodes of degree 2; all others of degree 1.
    pub degrees_ok: bool,
    /// Both butterfly counts equal n + C(n, 2).
    pub butterflies_ok: bool,
    /// In the end graph x5 and x6 share n + 1 neighbors and belong to every
    /// butterfly.
    pub end_shared_ok: bool,
    /// In the begin graph x5/x6 share n, x1/x2 share s, x3/x4 share t.
    pub begin_shared_ok: bool,
    /// The two graphs are not isomorphic under side-respecting relabeling.
    pub non_isomorphic: bool,
}

impl ConstructionReport {
    pub fn all_pass(&self) -> bool {
        self.node_counts_match_construction
            && self.degrees_ok
            && self.butterflies_ok
            && self.end_shared_ok
            && self.begin_shared_ok
            && self.non_isomorphic
    }
}

pub fn verify_construction(cp: &ConstructionPair) -> ConstructionReport {
    let (s, t, n) = (cp.s, cp.t, cp.n);
    let gb = &cp.g_begin;
    let ge = &cp.g_end;
    let x = |i: usize| i - 1;

    let expected_left = 7 + cp.add;
    let expected_right = s + t + n + 2 + cp.add;
    let node_counts_match_construction = gb.left_count() == expected_left
        && gb.right_count() == expected_right
        && ge.left_count() == expected_left
        && ge.right_count() == expected_right;
    let alternative_left_count = 7 + ((s + 1) % 2) + ((t + 1) % 2);

    let degrees_ok = {
        let db = gb.degree_sequences();
        let de = ge.degree_sequences();
        let roles_hold = |d: &crate::graph::DegreePair| {
            let left_roles = d.left[x(1)] == s
                && d.left[x(2)] == s
                && d.left[x(3)] == t
                && d.left[x(4)] == t
                && d.left[x(5)] == n + 1
                && d.left[x(6)] == n + 1
                && d.left[x(7)..].iter().all(|&deg| deg == 1);
            let two_degree_prefix = s + t + n + 1;
            let right_roles = d.right[..two_degree_prefix].iter().all(|&deg| deg == 2)
                && d.right[two_degree_prefix..].iter().all(|&deg| deg == 1);
            left_roles && right_roles
        };
        db == de && roles_hold(&db) && roles_hold(&de)
    };

    let expected_butterflies = cp.expected_butterflies();
    let butterflies_begin = gb.butterfly_count();
    let butterflies_end = ge.butterfly_count();
    let butterflies_ok =
        butterflies_begin == expected_butterflies && butterflies_end == expected_butterflies;

    let end_shared_ok = {
        let shared = ge.shared_left_neighbors(x(5), x(6)).expect("distinct");
        let pair = ge.butterflies_pair(x(5), x(6)).expect("distinct");
        shared == n + 1
            && pair == butterflies_end
            && ge.butterflies_node(x(5)) == butterflies_end
            && ge.butterflies_node(x(6)) == butterflies_end
    };

    let begin_shared_ok = gb.shared_left_neighbors(x(5), x(6)).expect("distinct") == n
        && gb.shared_left_neighbors(x(1), x(2)).expect("distinct") == s
        && gb.shared_left_neighbors(x(3), x(4)).expect("distinct") == t;

    let non_isomorphic = !are_isomorphic(gb, ge);

    ConstructionReport {
        s,
        t,
        n,
        add: cp.add,
        left_count: gb.left_count(),
        right_count: gb.right_count(),
        edge_count_begin: gb.edge_count(),
        edge_count_end: ge.edge_count(),
        butterflies_begin,
        butterflies_end,
        expected_butterflies,
        node_counts_match_construction,
        alternative_left_count,
        degrees_ok,
        butterflies_ok,
        end_shared_ok,
        begin_shared_ok,
        non_isomorphic,
    }
}
