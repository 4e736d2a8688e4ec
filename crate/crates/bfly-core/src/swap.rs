//! Bipartite swap operations of any size (q-BSOs).
//!
//! A q-BSO is an ordered list S of q distinct edges (u_i, a_i) together with
//! a derangement sigma of the indices; applying it replaces each (u_j, a_j)
//! with (u_j, a_sigma(j)). Left endpoints keep their edges and the right
//! endpoints are permuted among the same positions, so both degree sequences
//! are preserved. The classic 2-edge swap is the q = 2 case.
//!
//! Validity against a graph additionally requires every replacement edge to
//! be absent and — beyond the bare definition — pairwise distinct; without
//! distinctness the degree-preservation conclusion fails under set semantics.

use std::collections::HashSet;
use std::fmt;

use itertools::Itertools;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{choose2, BipartiteGraph};

/// A q-edge bipartite swap operation: edges plus a derangement of `0..q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QSwap {
    pub edges: Vec<(usize, usize)>,
    pub sigma: Vec<usize>,
}

impl QSwap {
    pub fn new(edges: Vec<(usize, usize)>, sigma: Vec<usize>) -> Self {
        QSwap { edges, sigma }
    }

    /// The classic 2-edge swap exchanging the right endpoints of two edges.
    pub fn bso(e1: (usize, usize), e2: (usize, usize)) -> Self {
        QSwap::new(vec![e1, e2], vec![1, 0])
    }

    pub fn q(&self) -> usize {
        self.edges.len()
    }

    /// Edges added when the swap is applied: (u_j, a_sigma(j)) for each j.
    pub fn replacement_edges(&self) -> Vec<(usize, usize)> {
        self.sigma
            .iter()
            .enumerate()
            .map(|(j, &sj)| (self.edges[j].0, self.edges[sj].1))
            .collect()
    }

    /// The swap that undoes this one on the resulting graph: the replacement
    /// edges with the inverse derangement.
    pub fn reversed(&self) -> QSwap {
        let q = self.q();
        let mut inverse = vec![0usize; q];
        for (j, &sj) in self.sigma.iter().enumerate() {
            inverse[sj] = j;
        }
        QSwap::new(self.replacement_edges(), inverse)
    }

    /// Outcome key: the unordered set of (removed, added) pairs. Two swaps
    /// with the same key perform the same rewiring.
    pub fn outcome_key(&self) -> Vec<((usize, usize), (usize, usize))> {
        let mut pairs: Vec<_> = self
            .edges
            .iter()
            .copied()
            .zip(self.replacement_edges())
            .collect();
        pairs.sort_unstable();
        pairs
    }
}

/// Reason a swap fails validation against a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SwapViolation {
    TooFewEdges,
    SigmaSizeMismatch,
    SigmaNotPermutation,
    NotDerangement,
    DuplicateSwapEdge,
    EdgeNotPresent,
    ReplacementExists,
    DuplicateReplacement,
}

impl fmt::Display for SwapViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SwapViolation::TooFewEdges => "too_few_edges",
            SwapViolation::SigmaSizeMismatch => "sigma_size_mismatch",
            SwapViolation::SigmaNotPermutation => "sigma_not_permutation",
            SwapViolation::NotDerangement => "not_derangement",
            SwapViolation::DuplicateSwapEdge => "duplicate_swap_edge",
            SwapViolation::EdgeNotPresent => "edge_not_present",
            SwapViolation::ReplacementExists => "replacement_exists",
            SwapViolation::DuplicateReplacement => "duplicate_replacement",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SwapError {
    #[error("invalid swap: {0}")]
    Invalid(SwapViolation),
    #[error("infeasible enumeration: q = {q} with {edges} edges ({reason})")]
    InfeasibleSize {
        q: usize,
        edges: usize,
        reason: &'static str,
    },
}

/// Checks every condition for `sw` to be a valid q-BSO on `g`; returns the
/// first violated condition as the reason.
pub fn validate_qbso(g: &BipartiteGraph, sw: &QSwap) -> Result<(), SwapViolation> {
    let q = sw.edges.len();
    if q < 2 {
        return Err(SwapViolation::TooFewEdges);
    }
    if sw.sigma.len() != q {
        return Err(SwapViolation::SigmaSizeMismatch);
    }
    let mut seen_idx = vec![false; q];
    for &s in &sw.sigma {
        if s >= q || seen_idx[s] {
            return Err(SwapViolation::SigmaNotPermutation);
        }
        seen_idx[s] = true;
    }
    if sw.sigma.iter().enumerate().any(|(j, &s)| j == s) {
        return Err(SwapViolation::NotDerangement);
    }
    let mut seen_edges = HashSet::with_capacity(q);
    for &e in &sw.edges {
        if !seen_edges.insert(e) {
            return Err(SwapViolation::DuplicateSwapEdge);
        }
        if !g.has_edge(e.0, e.1) {
            return Err(SwapViolation::EdgeNotPresent);
        }
    }
    let mut seen_repl = HashSet::with_capacity(q);
    for r in sw.replacement_edges() {
        if g.has_edge(r.0, r.1) {
            return Err(SwapViolation::ReplacementExists);
        }
        if !seen_repl.insert(r) {
            return Err(SwapViolation::DuplicateReplacement);
        }
    }
    Ok(())
}

/// Result of applying a swap: the new graph and the exact change in the
/// total butterfly count.
#[derive(Debug, Clone)]
pub struct SwapOutcome {
    pub graph_after: BipartiteGraph,
    pub butterfly_delta: i64,
}

/// Applies a validated swap, returning the rewired graph and butterfly delta.
pub fn apply_qbso(g: &BipartiteGraph, sw: &QSwap) -> Result<SwapOutcome, SwapError> {
    validate_qbso(g, sw).map_err(SwapError::Invalid)?;
    let (graph_after, butterfly_delta) = rewire(g, sw);
    Ok(SwapOutcome {
        graph_after,
        butterfly_delta,
    })
}

/// Butterfly-count change a valid swap would cause, computed incrementally:
/// only pairs of left nodes incident to the touched right nodes can change.
pub fn butterfly_delta(g: &BipartiteGraph, sw: &QSwap) -> Result<i64, SwapError> {
    validate_qbso(g, sw).map_err(SwapError::Invalid)?;
    Ok(rewire(g, sw).1)
}

fn rewire(g: &BipartiteGraph, sw: &QSwap) -> (BipartiteGraph, i64) {
    let removed: HashSet<(usize, usize)> = sw.edges.iter().copied().collect();
    let mut edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .copied()
        .filter(|e| !removed.contains(e))
        .collect();
    edges.extend(sw.replacement_edges());
    let after = BipartiteGraph::new(g.left_count(), g.right_count(), edges)
        .expect("validated swap produces a well-formed graph");

    // Shared-neighbor sets can change only for left nodes adjacent to a
    // touched right node (replacement lefts are among them already).
    let touched_rights: HashSet<usize> = sw.edges.iter().map(|&(_, a)| a).collect();
    let mut affected: HashSet<usize> = HashSet::new();
    for &a in &touched_rights {
        affected.extend(g.right_neighbors(a).iter().copied());
        affected.extend(after.right_neighbors(a).iter().copied());
    }
    let affected: Vec<usize> = {
        let mut v: Vec<usize> = affected.into_iter().collect();
        v.sort_unstable();
        v
    };
    let mut delta = 0i64;
    for (i, &u) in affected.iter().enumerate() {
        for &v in &affected[i + 1..] {
            let before = choose2(g.shared_left_neighbors(u, v).expect("u != v")) as i64;
            let now = choose2(after.shared_left_neighbors(u, v).expect("u != v")) as i64;
            delta += now - before;
        }
    }
    (after, delta)
}

/// All valid 2-edge swaps of `g`, each edge pair taken once in canonical
/// edge order.
pub fn enumerate_bsos(g: &BipartiteGraph) -> Vec<QSwap> {
    let edges = g.edges();
    let mut out = Vec::new();
    for i in 0..edges.len() {
        for j in (i + 1)..edges.len() {
            let sw = QSwap::bso(edges[i], edges[j]);
            if validate_qbso(g, &sw).is_ok() {
                out.push(sw);
            }
        }
    }
    out
}

/// Guard rails for exhaustive q-BSO enumeration.
#[derive(Debug, Clone, Copy)]
pub struct EnumerationLimits {
    pub max_q: usize,
    pub max_edges: usize,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        EnumerationLimits {
            max_q: 6,
            max_edges: 64,
        }
    }
}

impl EnumerationLimits {
    /// No caps; enumeration cost grows as C(|E|, q) * D_q.
    pub fn unbounded() -> Self {
        EnumerationLimits {
            max_q: usize::MAX,
            max_edges: usize::MAX,
        }
    }
}

/// Valid q-BSOs of `g`, deduplicated by outcome, in deterministic order.
#[derive(Debug, Clone)]
pub struct QbsoEnumeration {
    pub swaps: Vec<QSwap>,
    /// Count of valid (S, sigma) encodings before outcome deduplication.
    pub raw_valid_count: usize,
}

pub fn enumerate_qbsos(g: &BipartiteGraph, q: usize) -> Result<QbsoEnumeration, SwapError> {
    enumerate_qbsos_with(g, q, EnumerationLimits::default())
}

pub fn enumerate_qbsos_with(
    g: &BipartiteGraph,
    q: usize,
    limits: EnumerationLimits,
) -> Result<QbsoEnumeration, SwapError> {
    let m = g.edge_count();
    if q < 2 {
        return Err(SwapError::InfeasibleSize {
            q,
            edges: m,
            reason: "q must be at least 2",
        });
    }
    if q > m {
        return Err(SwapError::InfeasibleSize {
            q,
            edges: m,
            reason: "q exceeds the edge count",
        });
    }
    if q > limits.max_q || m > limits.max_edges {
        return Err(SwapError::InfeasibleSize {
            q,
            edges: m,
            reason: "over enumeration limits; pass explicit limits to override",
        });
    }
    let sigmas = derangements(q);
    let mut swaps = Vec::new();
    let mut raw_valid_count = 0usize;
    let mut seen_outcomes: HashSet<Vec<((usize, usize), (usize, usize))>> = HashSet::new();
    for combo in g.edges().iter().copied().combinations(q) {
        for sigma in &sigmas {
            let sw = QSwap::new(combo.clone(), sigma.clone());
            if validate_qbso(g, &sw).is_ok() {
                raw_valid_count += 1;
                if seen_outcomes.insert(sw.outcome_key()) {
                    swaps.push(sw);
                }
            }
        }
    }
    Ok(QbsoEnumeration {
        swaps,
        raw_valid_count,
    })
}

/// All derangements of `0..q` in lexicographic order.
pub fn derangements(q: usize) -> Vec<Vec<usize>> {
    (0..q)
        .permutations(q)
        .filter(|p| p.iter().enumerate().all(|(i, &v)| i != v))
        .collect()
}

/// Outcome of one naive sampling attempt: q uniform distinct edges plus a
/// uniform derangement, kept only if valid.
#[derive(Debug, Clone)]
pub enum SampleOutcome {
    Valid(QSwap),
    Rejected { swap: QSwap, reason: SwapViolation },
}

impl SampleOutcome {
    pub fn is_valid(&self) -> bool {
        matches!(self, SampleOutcome::Valid(_))
    }
}

/// Draws a q-BSO attempt: a uniform q-subset of edges (in canonical order)
/// and an independent uniform derangement. Deterministic given the RNG state.
pub fn sample_qbso_attempt<R: Rng + ?Sized>(
    g: &BipartiteGraph,
    q: usize,
    rng: &mut R,
) -> SampleOutcome {
    assert!(q >= 2, "q must be at least 2");
    assert!(q <= g.edge_count(), "q exceeds the edge count");
    let mut idx = rand::seq::index::sample(rng, g.edge_count(), q).into_vec();
    idx.sort_unstable();
    let edges: Vec<(usize, usize)> = idx.into_iter().map(|i| g.edges()[i]).collect();
    let sigma = uniform_derangement(q, rng);
    let sw = QSwap::new(edges, sigma);
    match validate_qbso(g, &sw) {
        Ok(()) => SampleOutcome::Valid(sw),
        Err(reason) => SampleOutcome::Rejected { swap: sw, reason },
    }
}

/// Uniform derangement via rejection from uniform permutations; acceptance
/// approaches 1/e.
pub fn uniform_derangement<R: Rng + ?Sized>(q: usize, rng: &mut R) -> Vec<usize> {
    assert!(q >= 2, "derangements need q >= 2");
    let mut perm: Vec<usize> = (0..q).collect();
    loop {
        use rand::seq::SliceRandom;
        perm.shuffle(rng);
        if perm.iter().enumerate().all(|(i, &v)| i != v) {
            return perm;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_bipartite, random_bipartite};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_matching() -> BipartiteGraph {
        BipartiteGraph::new(2, 2, vec![(0, 0), (1, 1)]).unwrap()
    }

    #[test]
    fn k22_swap_is_rejected_because_replacements_exist() {
        let sw = QSwap::bso((0, 0), (1, 1));
        assert_eq!(
            validate_qbso(&complete_bipartite(2, 2), &sw),
            Err(SwapViolation::ReplacementExists)
        );
    }

    #[test]
    fn matching_swap_is_valid_and_applies() {
        let g = two_matching();
        let sw = QSwap::bso((0, 0), (1, 1));
        assert_eq!(validate_qbso(&g, &sw), Ok(()));
        let out = apply_qbso(&g, &sw).unwrap();
        let expected = BipartiteGraph::new(2, 2, vec![(0, 1), (1, 0)]).unwrap();
        assert_eq!(out.graph_after, expected);
        assert_eq!(out.butterfly_delta, 0);
    }

    #[test]
    fn structural_violations_are_reported() {
        let g = two_matching();
        assert_eq!(
            validate_qbso(&g, &QSwap::new(vec![(0, 0)], vec![0])),
            Err(SwapViolation::TooFewEdges)
        );
        assert_eq!(
            validate_qbso(&g, &QSwap::new(vec![(0, 0), (1, 1)], vec![0])),
            Err(SwapViolation::SigmaSizeMismatch)
        );
        assert_eq!(
            validate_qbso(&g, &QSwap::new(vec![(0, 0), (1, 1)], vec![1, 1])),
            Err(SwapViolation::SigmaNotPermutation)
        );
        assert_eq!(
            validate_qbso(&g, &QSwap::new(vec![(0, 0), (1, 1)], vec![0, 1])),
            Err(SwapViolation::NotDerangement)
        );
        assert_eq!(
            validate_qbso(&g, &QSwap::new(vec![(0, 0), (0, 0)], vec![1, 0])),
            Err(SwapViolation::DuplicateSwapEdge)
        );
        assert_eq!(
            validate_qbso(&g, &QSwap::new(vec![(0, 0), (0, 1)], vec![1, 0])),
            Err(SwapViolation::EdgeNotPresent)
        );
    }

    #[test]
    fn duplicate_replacements_are_rejected() {
        // S carries the right value 0 twice; sigma routes both of left node
        // 0's edges onto it, so the replacements (0,0) and (0,0) collide.
        let g = BipartiteGraph::new(3, 4, vec![(0, 1), (0, 2), (1, 0), (2, 0)]).unwrap();
        let sw = QSwap::new(vec![(1, 0), (2, 0), (0, 1), (0, 2)], vec![2, 3, 1, 0]);
        assert_eq!(
            validate_qbso(&g, &sw),
            Err(SwapViolation::DuplicateReplacement)
        );
        // distinct right values cannot collide: a 4-swap crossing two stars
        let h = BipartiteGraph::new(2, 4, vec![(0, 0), (0, 1), (1, 2), (1, 3)]).unwrap();
        let ok = QSwap::new(vec![(0, 0), (0, 1), (1, 2), (1, 3)], vec![2, 3, 0, 1]);
        assert_eq!(validate_qbso(&h, &ok), Ok(()));
    }

    #[test]
    fn enumerate_bsos_on_k22_is_empty() {
        assert!(enumerate_bsos(&complete_bipartite(2, 2)).is_empty());
    }

    #[test]
    fn enumerate_bsos_on_two_matching_finds_the_unique_swap() {
        let swaps = enumerate_bsos(&two_matching());
        assert_eq!(swaps.len(), 1);
        assert_eq!(swaps[0], QSwap::bso((0, 0), (1, 1)));
    }

    #[test]
    fn perfect_matching_has_choose2_bsos() {
        for m in 2..=6 {
            let g = BipartiteGraph::new(m, m, (0..m).map(|i| (i, i))).unwrap();
            // brute-force oracle: every pair of matching edges is swappable
            let mut expected = 0;
            for i in 0..m {
                for j in (i + 1)..m {
                    if !g.has_edge(i, j) && !g.has_edge(j, i) {
                        expected += 1;
                    }
                }
            }
            assert_eq!(expected as u64, choose2(m));
            assert_eq!(enumerate_bsos(&g).len() as u64, choose2(m));
        }
    }

    #[test]
    fn qbso_enumeration_matches_bsos_at_q2() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..30 {
            let g = random_bipartite(5, 5, 0.4, &mut rng);
            if g.edge_count() < 2 {
                continue;
            }
            let bsos: HashSet<Vec<((usize, usize), (usize, usize))>> =
                enumerate_bsos(&g).iter().map(QSwap::outcome_key).collect();
            let qbsos: HashSet<Vec<((usize, usize), (usize, usize))>> = enumerate_qbsos(&g, 2)
                .unwrap()
                .swaps
                .iter()
                .map(QSwap::outcome_key)
                .collect();
            assert_eq!(bsos, qbsos);
        }
        assert!(enumerate_qbsos(&complete_bipartite(2, 2), 2)
            .unwrap()
            .swaps
            .is_empty());
    }

    #[test]
    fn enumeration_respects_limits() {
        let g = two_matching();
        assert!(matches!(
            enumerate_qbsos(&g, 3),
            Err(SwapError::InfeasibleSize { .. })
        ));
        let big = complete_bipartite(9, 9); // 81 edges > default cap
        assert!(matches!(
            enumerate_qbsos(&big, 2),
            Err(SwapError::InfeasibleSize { .. })
        ));
        assert!(enumerate_qbsos_with(&big, 2, EnumerationLimits::unbounded()).is_ok());
    }

    #[test]
    fn sampling_on_two_matching_always_yields_the_swap() {
        let g = two_matching();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            match sample_qbso_attempt(&g, 2, &mut rng) {
                SampleOutcome::Valid(sw) => {
                    assert_eq!(sw, QSwap::bso((0, 0), (1, 1)));
                }
                SampleOutcome::Rejected { .. } => panic!("the unique derangement is valid"),
            }
        }
    }

    #[test]
    fn sampling_on_k22_always_rejects_with_replacement_exists() {
        let g = complete_bipartite(2, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            match sample_qbso_attempt(&g, 2, &mut rng) {
                SampleOutcome::Valid(_) => panic!("no valid 2-BSO on K22"),
                SampleOutcome::Rejected { reason, .. } => {
                    assert_eq!(reason, SwapViolation::ReplacementExists)
                }
            }
        }
    }

    #[test]
    fn degree_sequences_are_preserved_on_random_valid_swaps() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut checked = 0;
        while checked < 500 {
            let g = random_bipartite(6, 6, 0.45, &mut rng);
            if g.edge_count() < 4 {
                continue;
            }
            let q = rng.random_range(2..=4.min(g.edge_count()));
            if let SampleOutcome::Valid(sw) = sample_qbso_attempt(&g, q, &mut rng) {
                let out = apply_qbso(&g, &sw).unwrap();
                assert_eq!(out.graph_after.degree_sequences(), g.degree_sequences());
                assert_eq!(out.graph_after.edge_count(), g.edge_count());
                checked += 1;
            }
        }
    }

    #[test]
    fn butterfly_delta_matches_full_recount() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let mut checked = 0;
        while checked < 10_000 {
            let g = random_bipartite(
                rng.random_range(3..=7),
                rng.random_range(3..=7),
                0.5,
                &mut rng,
            );
            if g.edge_count() < 4 {
                continue;
            }
            let q = rng.random_range(2..=4.min(g.edge_count()));
            if let SampleOutcome::Valid(sw) = sample_qbso_attempt(&g, q, &mut rng) {
                let before = g.butterfly_count() as i64;
                let out = apply_qbso(&g, &sw).unwrap();
                assert_eq!(
                    out.butterfly_delta,
                    out.graph_after.butterfly_count() as i64 - before
                );
                checked += 1;
            }
        }
    }

    #[test]
    fn swaps_are_constructively_reversible() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut checked = 0;
        while checked < 1000 {
            let g = random_bipartite(6, 6, 0.4, &mut rng);
            if g.edge_count() < 4 {
                continue;
            }
            let q = rng.random_range(2..=4.min(g.edge_count()));
            if let SampleOutcome::Valid(sw) = sample_qbso_attempt(&g, q, &mut rng) {
                let out = apply_qbso(&g, &sw).unwrap();
                let back = sw.reversed();
                assert_eq!(validate_qbso(&out.graph_after, &back), Ok(()));
                let restored = apply_qbso(&out.graph_after, &back).unwrap();
                assert_eq!(restored.graph_after, g);
                checked += 1;
            }
        }
    }

    #[test]
    fn destroying_the_only_butterfly_gives_minus_one() {
        // K22 on lefts {0,1} / rights {0,1}, plus slack to make a swap valid
        let g = BipartiteGraph::new(
            3,
            3,
            vec![(0, 0), (0, 1), (1, 0), (1, 1), (2, 2)],
        )
        .unwrap();
        assert_eq!(g.butterfly_count(), 1);
        let sw = QSwap::bso((0, 0), (2, 2));
        assert_eq!(validate_qbso(&g, &sw), Ok(()));
        assert_eq!(butterfly_delta(&g, &sw).unwrap(), -1);
    }

    #[test]
    fn acceptance_rate_drops_with_q() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let g = random_bipartite(8, 8, 0.5, &mut rng);
        assert!(g.edge_count() >= 8);
        let rate = |q: usize, rng: &mut ChaCha8Rng| {
            let n = 100_000;
            let mut ok = 0u32;
            for _ in 0..n {
                if sample_qbso_attempt(&g, q, rng).is_valid() {
                    ok += 1;
                }
            }
            f64::from(ok) / n as f64
        };
        let r2 = rate(2, &mut rng);
        let r4 = rate(4, &mut rng);
        assert!(
            r4 < r2,
            "expected acceptance to drop with q: rate(2) = {r2}, rate(4) = {r4}"
        );
    }

    #[test]
    fn json_encoding_shape() {
        let sw = QSwap::bso((0, 0), (1, 1));
        let json = serde_json::to_string(&sw).unwrap();
        assert_eq!(json, r#"{"edges":[[0,0],[1,1]],"sigma":[1,0]}"#);
        let back: QSwap = serde_json::from_str(&json).unwrap();
        assert_eq!(back, sw);
    }
}
