//! Exhaustive ground truth: all labeled bipartite graphs realizing a degree
//! pair, optionally filtered by butterfly count.
//!
//! Enumeration backtracks over left nodes in decreasing-degree order,
//! assigning each a set of right neighbors, with Gale-Ryser feasibility
//! pruning of the remaining sequence at every level. Members are labeled
//! graphs (no isomorphism classing); class a catalog afterwards through
//! [`crate::canon::canonical_form`] if needed.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::format::{parse_bip_blocks, write_bip};
use crate::graph::{BipartiteGraph, DegreePair};

/// Constraints defining a state space: exact degree sequences and, when set,
/// an exact butterfly count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub degrees: DegreePair,
    pub butterfly_target: Option<u64>,
}

impl EnsembleSpec {
    pub fn unconstrained(degrees: DegreePair) -> Self {
        EnsembleSpec {
            degrees,
            butterfly_target: None,
        }
    }

    pub fn with_butterflies(degrees: DegreePair, target: u64) -> Self {
        EnsembleSpec {
            degrees,
            butterfly_target: Some(target),
        }
    }

    /// The spec a given graph satisfies exactly.
    pub fn of_graph(g: &BipartiteGraph, constrain_butterflies: bool) -> Self {
        EnsembleSpec {
            degrees: g.degree_sequences(),
            butterfly_target: constrain_butterflies.then(|| g.butterfly_count()),
        }
    }

    pub fn matches(&self, g: &BipartiteGraph) -> bool {
        g.degree_sequences() == self.degrees
            && self
                .butterfly_target
                .map_or(true, |b| g.butterfly_count() == b)
    }
}

/// Every member of an ensemble, in canonical enumeration order (sorted by
/// edge list), with per-member butterfly counts.
#[derive(Debug, Clone)]
pub struct EnsembleCatalog {
    pub spec: EnsembleSpec,
    pub members: Vec<BipartiteGraph>,
    pub butterfly_counts: Vec<u64>,
}

impl EnsembleCatalog {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn butterfly_histogram(&self) -> HashMap<u64, usize> {
        let mut h = HashMap::new();
        for &b in &self.butterfly_counts {
            *h.entry(b).or_insert(0) += 1;
        }
        h
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnsembleError {
    #[error("no bipartite graph realizes the given degree sequences")]
    InfeasibleDegrees,
    #[error("member limit exceeded after enumerating {enumerated} graphs")]
    LimitExceeded { enumerated: usize },
}

/// True iff some simple bipartite graph realizes the pair (Gale-Ryser).
pub fn realization_exists(degrees: &DegreePair) -> bool {
    if degrees.left_sum() != degrees.right_sum() {
        return false;
    }
    gale_ryser_feasible(
        &degrees.left.iter().copied().sorted_unstable().rev().collect::<Vec<_>>(),
        &degrees.right,
    )
}

/// Gale-Ryser dominance check. `left_desc` must be sorted descending; `caps`
/// are the remaining right capacities in any order. Assumes equal sums.
fn gale_ryser_feasible(left_desc: &[usize], caps: &[usize]) -> bool {
    let mut prefix = 0usize;
    for k in 1..=left_desc.len() {
        prefix += left_desc[k - 1];
        let bound: usize = caps.iter().map(|&c| c.min(k)).sum();
        if prefix > bound {
            return false;
        }
    }
    true
}

/// Enumerates every labeled member of the ensemble, failing with
/// [`EnsembleError::LimitExceeded`] if more than `limit` members exist.
pub fn enumerate_ensemble(
    spec: &EnsembleSpec,
    limit: usize,
) -> Result<EnsembleCatalog, EnsembleError> {
    let mut members = Vec::new();
    let mut hit_limit = false;
    enumerate_ensemble_with(spec, |g| {
        if members.len() == limit {
            hit_limit = true;
            return false;
        }
        members.push(g.clone());
        true
    })?;
    if hit_limit {
        return Err(EnsembleError::LimitExceeded {
            enumerated: members.len(),
        });
    }
    members.sort_by(|a, b| a.edges().cmp(b.edges()));
    let butterfly_counts = members.iter().map(BipartiteGraph::butterfly_count).collect();
    Ok(EnsembleCatalog {
        spec: spec.clone(),
        members,
        butterfly_counts,
    })
}

/// Streaming enumeration: calls `visit` for each member in backtracking
/// order (not sorted); returning `false` stops the walk early.
pub fn enumerate_ensemble_with(
    spec: &EnsembleSpec,
    mut visit: impl FnMut(&BipartiteGraph) -> bool,
) -> Result<(), EnsembleError> {
    let degrees = &spec.degrees;
    if !realization_exists(degrees) {
        return Err(EnsembleError::InfeasibleDegrees);
    }
    // Process left nodes by decreasing degree; remember original ids.
    let mut order: Vec<usize> = (0..degrees.left.len()).collect();
    order.sort_by_key(|&u| std::cmp::Reverse(degrees.left[u]));
    let left_desc: Vec<usize> = order.iter().map(|&u| degrees.left[u]).collect();

    let mut caps = degrees.right.clone();
    let mut chosen: Vec<Vec<usize>> = vec![Vec::new(); order.len()];
    let mut stop = false;
    assign(
        spec,
        &order,
        &left_desc,
        0,
        &mut caps,
        &mut chosen,
        &mut visit,
        &mut stop,
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn assign(
    spec: &EnsembleSpec,
    order: &[usize],
    left_desc: &[usize],
    level: usize,
    caps: &mut Vec<usize>,
    chosen: &mut Vec<Vec<usize>>,
    visit: &mut impl FnMut(&BipartiteGraph) -> bool,
    stop: &mut bool,
) {
    if *stop {
        return;
    }
    if level == order.len() {
        let edges = order
            .iter()
            .zip(chosen.iter())
            .flat_map(|(&u, nbrs)| nbrs.iter().map(move |&a| (u, a)));
        let g = BipartiteGraph::new(spec.degrees.left.len(), spec.degrees.right.len(), edges)
            .expect("assigned neighbor sets are valid");
        if spec.butterfly_target.map_or(true, |b| g.butterfly_count() == b) && !visit(&g) {
            *stop = true;
        }
        return;
    }
    let want = left_desc[level];
    let available: Vec<usize> = (0..caps.len()).filter(|&a| caps[a] > 0).collect();
    if available.len() < want {
        return;
    }
    for combo in available.into_iter().combinations(want) {
        for &a in &combo {
            caps[a] -= 1;
        }
        if gale_ryser_feasible(&left_desc[level + 1..], caps) {
            chosen[level] = combo.clone();
            assign(spec, order, left_desc, level + 1, caps, chosen, visit, stop);
            chosen[level].clear();
        }
        for &a in &combo {
            caps[a] += 1;
        }
        if *stop {
            return;
        }
    }
}

/// Index file stored next to a persisted catalog.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CatalogIndex {
    pub schema: String,
    pub left_degrees: Vec<usize>,
    pub right_degrees: Vec<usize>,
    pub butterfly_target: Option<u64>,
    pub count: usize,
    /// Butterfly count -> number of members, sorted by count.
    pub butterfly_histogram: Vec<(u64, usize)>,
}

#[derive(Debug, Error)]
pub enum CatalogIoError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("member parse error: {0}")]
    Parse(#[from] crate::format::BipParseError),
    #[error("index parse error: {0}")]
    Index(#[from] serde_json::Error),
    #[error("index reports {expected} members but file holds {found}")]
    CountMismatch { expected: usize, found: usize },
}

/// Writes `members.bip` (concatenated blocks) and `index.json` into `dir`.
pub fn write_catalog(catalog: &EnsembleCatalog, dir: &Path) -> Result<(), CatalogIoError> {
    fs::create_dir_all(dir)?;
    let mut blocks = String::new();
    for g in &catalog.members {
        blocks.push_str(&write_bip(g));
    }
    fs::write(dir.join("members.bip"), blocks)?;
    let mut histogram: Vec<(u64, usize)> = catalog.butterfly_histogram().into_iter().collect();
    histogram.sort_unstable();
    let index = CatalogIndex {
        schema: "bfly/1".to_string(),
        left_degrees: catalog.spec.degrees.left.clone(),
        right_degrees: catalog.spec.degrees.right.clone(),
        butterfly_target: catalog.spec.butterfly_target,
        count: catalog.members.len(),
        butterfly_histogram: histogram,
    };
    let mut json = serde_json::to_string_pretty(&index).expect("index serializes");
    json.push('\n');
    fs::write(dir.join("index.json"), json)?;
    Ok(())
}

pub fn read_catalog(dir: &Path) -> Result<EnsembleCatalog, CatalogIoError> {
    let index: CatalogIndex =
        serde_json::from_str(&fs::read_to_string(dir.join("index.json"))?)?;
    let members = parse_bip_blocks(&fs::read_to_string(dir.join("members.bip"))?)?;
    if members.len() != index.count {
        return Err(CatalogIoError::CountMismatch {
            expected: index.count,
            found: members.len(),
        });
    }
    let butterfly_counts = members.iter().map(BipartiteGraph::butterfly_count).collect();
    Ok(EnsembleCatalog {
        spec: EnsembleSpec {
            degrees: DegreePair::new(index.left_degrees, index.right_degrees),
            butterfly_target: index.butterfly_target,
        },
        members,
        butterfly_counts,
    })
}
