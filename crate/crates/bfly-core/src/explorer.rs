//! State-space exploration over swap moves.
//!
//! [`reachable_set`] closes a start graph under valid q-BSOs of bounded size,
//! optionally keeping only butterfly-preserving moves, with states identified
//! either as labeled graphs or up to side-respecting isomorphism.
//! [`is_connected_under`] builds the full transition graph over an enumerated
//! ensemble. [`direct_qbso`] produces the one swap of size |E' \ E''| that
//! maps any ensemble member onto any other in a single move.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon::{canonical_form, CanonicalForm};
use crate::ensemble::{enumerate_ensemble, EnsembleError, EnsembleSpec};
use crate::graph::BipartiteGraph;
use crate::swap::{
    apply_qbso, enumerate_qbsos_with, validate_qbso, EnumerationLimits, QSwap, SwapError,
};

#[derive(Debug, Error)]
pub enum ExploreError {
    #[error("q_max must be at least 2, got {0}")]
    QTooSmall(usize),
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
    #[error(transparent)]
    Swap(#[from] SwapError),
}

/// Caps that keep runaway explorations bounded.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ExploreBudget {
    pub max_visited: usize,
    pub max_moves: u64,
}

impl Default for ExploreBudget {
    fn default() -> Self {
        ExploreBudget {
            max_visited: 10_000_000,
            max_moves: 100_000_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExploreOptions {
    pub q_max: usize,
    pub preserve_butterflies: bool,
    /// Deduplicate states by canonical form instead of labeled identity.
    pub iso_mode: bool,
    pub target: Option<BipartiteGraph>,
    pub budget: ExploreBudget,
    pub limits: EnumerationLimits,
}

impl ExploreOptions {
    pub fn new(q_max: usize) -> Self {
        ExploreOptions {
            q_max,
            preserve_butterflies: false,
            iso_mode: false,
            target: None,
            budget: ExploreBudget::default(),
            limits: EnumerationLimits::default(),
        }
    }
}

/// Result of a bounded-q BFS closure.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExplorationReport {
    pub start: CanonicalForm,
    pub q_max: usize,
    pub preserve_butterflies: bool,
    pub iso_mode: bool,
    pub visited_count: usize,
    pub target_found: bool,
    pub depth_reached: usize,
    /// Number of deduplicated valid moves applied during expansion.
    pub moves_expanded: u64,
    /// False when a budget cap stopped the walk before closure.
    pub completed: bool,
    /// Swap sequence from the start to the target, when one was found.
    pub witness: Option<Vec<QSwap>>,
}

/// BFS closure of `start`; see [`reachable_states`] to also get the states.
pub fn reachable_set(
    start: &BipartiteGraph,
    opts: &ExploreOptions,
) -> Result<ExplorationReport, ExploreError> {
    reachable_states(start, opts).map(|(report, _)| report)
}

/// BFS closure returning the report plus one representative labeled graph
/// per visited state.
pub fn reachable_states(
    start: &BipartiteGraph,
    opts: &ExploreOptions,
) -> Result<(ExplorationReport, Vec<BipartiteGraph>), ExploreError> {
    if opts.q_max < 2 {
        return Err(ExploreError::QTooSmall(opts.q_max));
    }
    let state_key = |g: &BipartiteGraph| -> StateKey {
        if opts.iso_mode {
            let cf = canonical_form(g);
            StateKey(cf.left_count, cf.right_count, cf.canonical_edges)
        } else {
            StateKey(g.left_count(), g.right_count(), g.edges().to_vec())
        }
    };
    let target_key = opts.target.as_ref().map(|t| state_key(t));

    struct Node {
        graph: BipartiteGraph,
        parent: Option<(usize, QSwap)>,
        depth: usize,
    }
    let mut nodes: Vec<Node> = Vec::new();
    let mut visited: HashMap<StateKey, usize> = HashMap::new();
    let mut queue: VecDeque<usize> = VecDeque::new();

    let start_key = state_key(start);
    let mut target_found = Some(&start_key) == target_key.as_ref();
    let mut found_at: Option<usize> = target_found.then_some(0);
    visited.insert(start_key, 0);
    nodes.push(Node {
        graph: start.clone(),
        parent: None,
        depth: 0,
    });
    queue.push_back(0);

    let mut moves_expanded = 0u64;
    let mut depth_reached = 0usize;
    let mut completed = true;

    'bfs: while let Some(id) = queue.pop_front() {
        if target_found {
            break;
        }
        let depth = nodes[id].depth;
        for q in 2..=opts.q_max.min(nodes[id].graph.edge_count()) {
            let enumeration = enumerate_qbsos_with(&nodes[id].graph, q, opts.limits)?;
            for sw in enumeration.swaps {
                moves_expanded += 1;
                if moves_expanded > opts.budget.max_moves {
                    completed = false;
                    break 'bfs;
                }
                let outcome =
                    apply_qbso(&nodes[id].graph, &sw).expect("enumerated swaps are valid");
                if opts.preserve_butterflies && outcome.butterfly_delta != 0 {
                    continue;
                }
                let key = state_key(&outcome.graph_after);
                if visited.contains_key(&key) {
                    continue;
                }
                let is_target = target_key.as_ref() == Some(&key);
                let new_id = nodes.len();
                visited.insert(key, new_id);
                nodes.push(Node {
                    graph: outcome.graph_after,
                    parent: Some((id, sw)),
                    depth: depth + 1,
                });
                depth_reached = depth_reached.max(depth + 1);
                if is_target {
                    target_found = true;
                    found_at = Some(new_id);
                    break 'bfs;
                }
                if visited.len() > opts.budget.max_visited {
                    completed = false;
                    break 'bfs;
                }
                queue.push_back(new_id);
            }
        }
    }

    let witness = found_at.map(|mut id| {
        let mut path = Vec::new();
        while let Some((parent, sw)) = nodes[id].parent.clone() {
            path.push(sw);
            id = parent;
        }
        path.reverse();
        path
    });

    let report = ExplorationReport {
        start: canonical_form(start),
        q_max: opts.q_max,
        preserve_butterflies: opts.preserve_butterflies,
        iso_mode: opts.iso_mode,
        visited_count: visited.len(),
        target_found,
        depth_reached,
        moves_expanded,
        completed,
        witness,
    };
    let states = nodes.into_iter().map(|n| n.graph).collect();
    Ok((report, states))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct StateKey(usize, usize, Vec<(usize, usize)>);

/// Applies a swap sequence, validating each step.
pub fn replay_swaps(
    start: &BipartiteGraph,
    swaps: &[QSwap],
) -> Result<BipartiteGraph, SwapError> {
    let mut g = start.clone();
    for sw in swaps {
        g = apply_qbso(&g, sw)?.graph_after;
    }
    Ok(g)
}

/// Connectivity verdict for the transition graph of an enumerated ensemble
/// under moves of size at most `q_max`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConnectivityReport {
    pub member_count: usize,
    pub connected: bool,
    /// Sizes of the connected components, largest first.
    pub component_sizes: Vec<usize>,
}

pub fn is_connected_under(
    spec: &EnsembleSpec,
    q_max: usize,
    member_limit: usize,
) -> Result<ConnectivityReport, ExploreError> {
    if q_max < 2 {
        return Err(ExploreError::QTooSmall(q_max));
    }
    let catalog = enumerate_ensemble(spec, member_limit)?;
    let index: HashMap<Vec<(usize, usize)>, usize> = catalog
        .members
        .iter()
        .enumerate()
        .map(|(i, g)| (g.edges().to_vec(), i))
        .collect();
    let mut dsu = Dsu::new(catalog.members.len());
    for (i, g) in catalog.members.iter().enumerate() {
        for q in 2..=q_max.min(g.edge_count()) {
            let enumeration = enumerate_qbsos_with(g, q, EnumerationLimits::unbounded())?;
            for sw in enumeration.swaps {
                let after = apply_qbso(g, &sw).expect("enumerated swaps are valid").graph_after;
                // Moves leaving the ensemble are not edges of the state space.
                if let Some(&j) = index.get(&after.edges().to_vec()) {
                    dsu.union(i, j);
                }
            }
        }
    }
    let mut component_sizes = dsu.component_sizes();
    component_sizes.sort_unstable_by(|a, b| b.cmp(a));
    Ok(ConnectivityReport {
        member_count: catalog.members.len(),
        connected: component_sizes.len() <= 1,
        component_sizes,
    })
}

struct Dsu {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }

    fn component_sizes(&mut self) -> Vec<usize> {
        let n = self.parent.len();
        let mut sizes: HashMap<usize, usize> = HashMap::new();
        for x in 0..n {
            let r = self.find(x);
            *sizes.entry(r).or_insert(0) += 1;
        }
        sizes.into_values().collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DirectSwapError {
    #[error("graphs must share node counts and degree sequences")]
    DegreeMismatch,
    #[error("graphs are identical; the empty difference is not a swap")]
    IdenticalGraphs,
}

/// Builds the single q-BSO with q = |E' \ E''| transforming `g_from` exactly
/// into `g_to`. Each removed edge (u, a) is matched to the first unused added
/// edge with the same left endpoint, and sigma is assembled by routing every
/// removed position to an unused position holding the required right value.
/// A fixed point would force a replacement edge to equal a removed one,
/// which is impossible for disjoint difference sets, so sigma is always a
/// derangement.
pub fn direct_qbso(
    g_from: &BipartiteGraph,
    g_to: &BipartiteGraph,
) -> Result<QSwap, DirectSwapError> {
    if g_from.left_count() != g_to.left_count()
        || g_from.right_count() != g_to.right_count()
        || g_from.degree_sequences() != g_to.degree_sequences()
    {
        return Err(DirectSwapError::DegreeMismatch);
    }
    let removed: Vec<(usize, usize)> = g_from
        .edges()
        .iter()
        .copied()
        .filter(|&(u, a)| !g_to.has_edge(u, a))
        .collect();
    if removed.is_empty() {
        return Err(DirectSwapError::IdenticalGraphs);
    }
    let added: Vec<(usize, usize)> = g_to
        .edges()
        .iter()
        .copied()
        .filter(|&(u, a)| !g_from.has_edge(u, a))
        .collect();
    debug_assert_eq!(removed.len(), added.len());

    let q = removed.len();
    // Match each removed edge to an added edge with the same left endpoint,
    // smallest unused index first. Equal left degrees guarantee a match.
    let mut added_used = vec![false; q];
    let mut wanted_right = vec![0usize; q];
    for (i, &(u, _)) in removed.iter().enumerate() {
        let k = (0..q)
            .find(|&k| !added_used[k] && added[k].0 == u)
            .expect("equal left degrees provide an unused added edge per removal");
        added_used[k] = true;
        wanted_right[i] = added[k].1;
    }
    // sigma(i) = an unused removed position whose right endpoint equals the
    // right value this position must receive.
    let mut pos_used = vec![false; q];
    let mut sigma = vec![0usize; q];
    for i in 0..q {
        let j = (0..q)
            .find(|&j| !pos_used[j] && removed[j].1 == wanted_right[i])
            .expect("equal right degrees provide an unused position per value");
        pos_used[j] = true;
        sigma[i] = j;
    }
    let sw = QSwap::new(removed, sigma);
    assert!(
        sw.sigma.iter().enumerate().all(|(i, &s)| i != s),
        "difference sets are disjoint, so sigma cannot have fixed points"
    );
    debug_assert_eq!(validate_qbso(g_from, &sw), Ok(()));
    Ok(sw)
}

/// Smallest q <= `q_cap` for which a single valid q-BSO maps `g_from` to
/// `g_to` (exactly, or up to isomorphism when `iso` is set); `None` if no
/// single bounded move works.
pub fn min_single_swap_size(
    g_from: &BipartiteGraph,
    g_to: &BipartiteGraph,
    q_cap: usize,
    iso: bool,
) -> Result<Option<usize>, ExploreError> {
    if q_cap < 2 {
        return Err(ExploreError::QTooSmall(q_cap));
    }
    let target_beta = g_to.butterfly_count();
    let beta_from = g_from.butterfly_count() as i64;
    let target_cf = iso.then(|| canonical_form(g_to));
    for q in 2..=q_cap.min(g_from.edge_count()) {
        let enumeration = enumerate_qbsos_with(g_from, q, EnumerationLimits::unbounded())?;
        for sw in enumeration.swaps {
            let outcome = apply_qbso(g_from, &sw).expect("enumerated swaps are valid");
            if beta_from + outcome.butterfly_delta != target_beta as i64 {
                continue;
            }
            let hit = if let Some(cf) = &target_cf {
                canonical_form(&outcome.graph_after).same_class(cf)
            } else {
                outcome.graph_after == *g_to
            };
            if hit {
                return Ok(Some(q));
            }
        }
    }
    Ok(None)
}
