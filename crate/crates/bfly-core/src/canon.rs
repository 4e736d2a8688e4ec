//! Side-respecting canonical forms for bipartite graph isomorphism.
//!
//! Two graphs get equal canonical forms exactly when one can be turned into
//! the other by relabeling left nodes among themselves and right nodes among
//! themselves. The labeling is found per connected component by iterated
//! color refinement seeded with (side, degree), with backtracking over the
//! residual symmetry; cells of mutual twins (identical neighbor sets) branch
//! only once. Components are then ordered by their certificates. Graphs here
//! are small, so worst-case backtracking is acceptable.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::graph::BipartiteGraph;

/// Canonical representative of a graph's side-respecting isomorphism class.
///
/// `canonical_edges` is sorted; together with the node counts it is equal for
/// two graphs iff they are isomorphic. The relabelings map original ids to
/// canonical ids and satisfy
/// `sorted({(left_relabeling[u], right_relabeling[a])}) == canonical_edges`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CanonicalForm {
    pub left_count: usize,
    pub right_count: usize,
    pub canonical_edges: Vec<(usize, usize)>,
    pub left_relabeling: Vec<usize>,
    pub right_relabeling: Vec<usize>,
}

impl CanonicalForm {
    /// The class key: everything that identifies the isomorphism class.
    pub fn key(&self) -> (usize, usize, &[(usize, usize)]) {
        (self.left_count, self.right_count, &self.canonical_edges)
    }

    pub fn same_class(&self, other: &CanonicalForm) -> bool {
        self.key() == other.key()
    }
}

pub fn are_isomorphic(a: &BipartiteGraph, b: &BipartiteGraph) -> bool {
    if a.left_count() != b.left_count()
        || a.right_count() != b.right_count()
        || a.edge_count() != b.edge_count()
    {
        return false;
    }
    canonical_form(a).same_class(&canonical_form(b))
}

/// Deterministic side-respecting canonical labeling.
pub fn canonical_form(g: &BipartiteGraph) -> CanonicalForm {
    let comps = components(g);
    let mut canonized: Vec<CanonizedComponent> = comps
        .into_iter()
        .map(|c| {
            let (cert, left_order, right_order) = canonize_component(&c);
            CanonizedComponent {
                cert,
                left_order,
                right_order,
                comp: c,
            }
        })
        .collect();
    // Components sort by an isomorphism-invariant key, so equal inputs up to
    // relabeling produce the same global layout.
    canonized.sort_by(|x, y| {
        (x.comp.left_ids.len(), x.comp.right_ids.len(), &x.cert).cmp(&(
            y.comp.left_ids.len(),
            y.comp.right_ids.len(),
            &y.cert,
        ))
    });

    let mut left_relabeling = vec![usize::MAX; g.left_count()];
    let mut right_relabeling = vec![usize::MAX; g.right_count()];
    let mut canonical_edges = Vec::with_capacity(g.edge_count());
    let (mut left_off, mut right_off) = (0usize, 0usize);
    for cc in &canonized {
        for (local, &pos) in cc.left_order.iter().enumerate() {
            left_relabeling[cc.comp.left_ids[local]] = left_off + pos;
        }
        for (local, &pos) in cc.right_order.iter().enumerate() {
            right_relabeling[cc.comp.right_ids[local]] = right_off + pos;
        }
        for &(u, a) in &cc.cert {
            canonical_edges.push((left_off + u, right_off + a));
        }
        left_off += cc.comp.left_ids.len();
        right_off += cc.comp.right_ids.len();
    }
    canonical_edges.sort_unstable();
    CanonicalForm {
        left_count: g.left_count(),
        right_count: g.right_count(),
        canonical_edges,
        left_relabeling,
        right_relabeling,
    }
}

struct CanonizedComponent {
    cert: Vec<(usize, usize)>,
    left_order: Vec<usize>,
    right_order: Vec<usize>,
    comp: Component,
}

/// One connected component, with original node ids and local edges.
struct Component {
    left_ids: Vec<usize>,
    right_ids: Vec<usize>,
    /// Edges in local coordinates (indices into the id vectors above).
    edges: Vec<(usize, usize)>,
}

fn components(g: &BipartiteGraph) -> Vec<Component> {
    let mut left_seen = vec![false; g.left_count()];
    let mut right_seen = vec![false; g.right_count()];
    let mut comps = Vec::new();
    for start in 0..g.left_count() {
        if left_seen[start] {
            continue;
        }
        left_seen[start] = true;
        let mut left_ids = vec![start];
        let mut right_ids = Vec::new();
        let mut stack = vec![(true, start)];
        while let Some((is_left, node)) = stack.pop() {
            if is_left {
                for &a in g.left_neighbors(node) {
                    if !right_seen[a] {
                        right_seen[a] = true;
                        right_ids.push(a);
                        stack.push((false, a));
                    }
                }
            } else {
                for &u in g.right_neighbors(node) {
                    if !left_seen[u] {
                        left_seen[u] = true;
                        left_ids.push(u);
                        stack.push((true, u));
                    }
                }
            }
        }
        left_ids.sort_unstable();
        right_ids.sort_unstable();
        let left_local: HashMap<usize, usize> =
            left_ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let right_local: HashMap<usize, usize> =
            right_ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut edges = Vec::new();
        for &u in &left_ids {
            for &a in g.left_neighbors(u) {
                edges.push((left_local[&u], right_local[&a]));
            }
        }
        edges.sort_unstable();
        comps.push(Component {
            left_ids,
            right_ids,
            edges,
        });
    }
    // Isolated right nodes form their own single-node components.
    for a in 0..g.right_count() {
        if !right_seen[a] {
            comps.push(Component {
                left_ids: Vec::new(),
                right_ids: vec![a],
                edges: Vec::new(),
            });
        }
    }
    comps
}

/// Ordered partition of one component's nodes; cell order encodes the
/// tentative canonical order of the color classes.
#[derive(Clone)]
struct Partition {
    left_cells: Vec<Vec<usize>>,
    right_cells: Vec<Vec<usize>>,
}

impl Partition {
    fn is_discrete(&self) -> bool {
        self.left_cells.iter().all(|c| c.len() == 1)
            && self.right_cells.iter().all(|c| c.len() == 1)
    }
}

struct ComponentCtx<'a> {
    left_adj: Vec<Vec<usize>>,
    right_adj: Vec<Vec<usize>>,
    edges: &'a [(usize, usize)],
}

/// Returns (canonical local edges, left position array, right position array):
/// `left_order[local] = canonical id` within the component.
fn canonize_component(c: &Component) -> (Vec<(usize, usize)>, Vec<usize>, Vec<usize>) {
    let ln = c.left_ids.len();
    let rn = c.right_ids.len();
    let mut left_adj = vec![Vec::new(); ln];
    let mut right_adj = vec![Vec::new(); rn];
    for &(u, a) in &c.edges {
        left_adj[u].push(a);
        right_adj[a].push(u);
    }
    let ctx = ComponentCtx {
        left_adj,
        right_adj,
        edges: &c.edges,
    };

    // Seed cells by degree, one shared cell per degree value and side.
    let mut part = Partition {
        left_cells: seed_cells(ln, |u| ctx.left_adj[u].len()),
        right_cells: seed_cells(rn, |a| ctx.right_adj[a].len()),
    };
    refine(&ctx, &mut part);

    let mut best: Option<(Vec<(usize, usize)>, Vec<usize>, Vec<usize>)> = None;
    search(&ctx, part, &mut best);
    best.expect("search always yields at least one labeling")
}

fn seed_cells(n: usize, degree: impl Fn(usize) -> usize) -> Vec<Vec<usize>> {
    let mut by_degree: Vec<(usize, usize)> = (0..n).map(|v| (degree(v), v)).collect();
    by_degree.sort_unstable();
    let mut cells: Vec<Vec<usize>> = Vec::new();
    for (d, v) in by_degree {
        match cells.last_mut() {
            Some(last) if degree(last[0]) == d => last.push(v),
            _ => cells.push(vec![v]),
        }
    }
    cells
}

/// Refines both sides until stable: a node's signature is the multiset of its
/// neighbors' current cell indices on the opposite side. Sub-cells are ordered
/// by signature, which is isomorphism-invariant.
fn refine(ctx: &ComponentCtx, part: &mut Partition) {
    loop {
        let right_index = cell_index(&part.right_cells, ctx.right_adj.len());
        let split_left = split_side(&mut part.left_cells, |u| {
            let mut sig: Vec<usize> = ctx.left_adj[u].iter().map(|&a| right_index[a]).collect();
            sig.sort_unstable();
            sig
        });
        let left_index = cell_index(&part.left_cells, ctx.left_adj.len());
        let split_right = split_side(&mut part.right_cells, |a| {
            let mut sig: Vec<usize> = ctx.right_adj[a].iter().map(|&u| left_index[u]).collect();
            sig.sort_unstable();
            sig
        });
        if !split_left && !split_right {
            return;
        }
    }
}

fn cell_index(cells: &[Vec<usize>], n: usize) -> Vec<usize> {
    let mut index = vec![0usize; n];
    for (i, cell) in cells.iter().enumerate() {
        for &v in cell {
            index[v] = i;
        }
    }
    index
}

fn split_side(cells: &mut Vec<Vec<usize>>, sig: impl Fn(usize) -> Vec<usize>) -> bool {
    let mut new_cells = Vec::with_capacity(cells.len());
    let mut changed = false;
    for cell in cells.iter() {
        if cell.len() == 1 {
            new_cells.push(cell.clone());
            continue;
        }
        let mut grouped: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        for &v in cell {
            let s = sig(v);
            match grouped.iter_mut().find(|(gs, _)| *gs == s) {
                Some((_, members)) => members.push(v),
                None => grouped.push((s, vec![v])),
            }
        }
        if grouped.len() > 1 {
            changed = true;
            grouped.sort_by(|a, b| a.0.cmp(&b.0));
        }
        for (_, members) in grouped {
            new_cells.push(members);
        }
    }
    *cells = new_cells;
    changed
}

fn search(
    ctx: &ComponentCtx,
    part: Partition,
    best: &mut Option<(Vec<(usize, usize)>, Vec<usize>, Vec<usize>)>,
) {
    if part.is_discrete() {
        let leaf = leaf_certificate(ctx, &part);
        if best.as_ref().map_or(true, |b| leaf.0 < b.0) {
            *best = Some(leaf);
        }
        return;
    }
    // Target: the first non-singleton cell, left side first.
    let (is_left, cell_idx) = first_non_singleton(&part);
    let cell = if is_left {
        &part.left_cells[cell_idx]
    } else {
        &part.right_cells[cell_idx]
    };
    // Nodes with identical neighbor sets are interchangeable by an
    // automorphism, so one representative per distinct neighborhood suffices.
    let mut reps: Vec<usize> = Vec::new();
    let mut seen_nbrs: Vec<&Vec<usize>> = Vec::new();
    for &v in cell {
        let nbrs = if is_left {
            &ctx.left_adj[v]
        } else {
            &ctx.right_adj[v]
        };
        if !seen_nbrs.iter().any(|&s| s == nbrs) {
            seen_nbrs.push(nbrs);
            reps.push(v);
        }
    }
    for v in reps {
        let mut child = part.clone();
        let cells = if is_left {
            &mut child.left_cells
        } else {
            &mut child.right_cells
        };
        let rest: Vec<usize> = cells[cell_idx].iter().copied().filter(|&x| x != v).collect();
        cells[cell_idx] = vec![v];
        cells.insert(cell_idx + 1, rest);
        refine(ctx, &mut child);
        search(ctx, child, best);
    }
}

fn first_non_singleton(part: &Partition) -> (bool, usize) {
    for (i, c) in part.left_cells.iter().enumerate() {
        if c.len() > 1 {
            return (true, i);
        }
    }
    for (i, c) in part.right_cells.iter().enumerate() {
        if c.len() > 1 {
            return (false, i);
        }
    }
    unreachable!("called on a discrete partition")
}

fn leaf_certificate(
    ctx: &ComponentCtx,
    part: &Partition,
) -> (Vec<(usize, usize)>, Vec<usize>, Vec<usize>) {
    let mut left_order = vec![0usize; part.left_cells.len()];
    for (pos, cell) in part.left_cells.iter().enumerate() {
        left_order[cell[0]] = pos;
    }
    let mut right_order = vec![0usize; part.right_cells.len()];
    for (pos, cell) in part.right_cells.iter().enumerate() {
        right_order[cell[0]] = pos;
    }
    let mut cert: Vec<(usize, usize)> = ctx
        .edges
        .iter()
        .map(|&(u, a)| (left_order[u], right_order[a]))
        .collect();
    cert.sort_unstable();
    (cert, left_order, right_order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_bipartite, random_bipartite, BipartiteGraph};
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_perm(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let mut p: Vec<usize> = (0..n).collect();
        p.shuffle(rng);
        p
    }

    #[test]
    fn relabeling_satisfies_certificate_equation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let g = random_bipartite(
                rng.random_range(1..=7),
                rng.random_range(1..=7),
                0.4,
                &mut rng,
            );
            let cf = canonical_form(&g);
            let mut relabeled: Vec<(usize, usize)> = g
                .edges()
                .iter()
                .map(|&(u, a)| (cf.left_relabeling[u], cf.right_relabeling[a]))
                .collect();
            relabeled.sort_unstable();
            assert_eq!(relabeled, cf.canonical_edges);
        }
    }

    #[test]
    fn invariant_under_side_respecting_relabelings() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let g = random_bipartite(
                rng.random_range(1..=7),
                rng.random_range(1..=7),
                0.45,
                &mut rng,
            );
            let base = canonical_form(&g);
            for _ in 0..10 {
                let lp = random_perm(g.left_count(), &mut rng);
                let rp = random_perm(g.right_count(), &mut rng);
                let h = g.relabeled(&lp, &rp);
                assert!(base.same_class(&canonical_form(&h)));
            }
        }
    }

    #[test]
    fn distinguishes_k22_from_path() {
        let k22 = complete_bipartite(2, 2);
        // 4-edge path over 2+3 nodes has a different degree multiset already
        let path = BipartiteGraph::new(2, 3, vec![(0, 0), (0, 1), (1, 1), (1, 2)]).unwrap();
        assert!(!are_isomorphic(&k22, &path));
    }

    #[test]
    fn two_relabelings_of_k22_agree() {
        let a = BipartiteGraph::new(2, 2, vec![(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap();
        let b = a.relabeled(&[1, 0], &[1, 0]);
        assert_eq!(canonical_form(&a).canonical_edges, canonical_form(&b).canonical_edges);
        assert!(are_isomorphic(&a, &b));
    }

    #[test]
    fn isolated_nodes_distinguish_classes() {
        let g = BipartiteGraph::new(2, 2, vec![(0, 0)]).unwrap();
        let h = BipartiteGraph::new(1, 1, vec![(0, 0)]).unwrap();
        assert!(!are_isomorphic(&g, &h));
        // same edge shape, isolated nodes on different sides
        let g2 = BipartiteGraph::new(2, 1, vec![(0, 0)]).unwrap();
        let h2 = BipartiteGraph::new(1, 2, vec![(0, 0)]).unwrap();
        assert!(!are_isomorphic(&g2, &h2));
    }

    #[test]
    fn sides_are_not_interchangeable() {
        // star with center on the left vs center on the right
        let left_star = complete_bipartite(1, 3);
        let right_star = complete_bipartite(3, 1);
        assert!(!are_isomorphic(&left_star, &right_star));
    }

    #[test]
    fn highly_symmetric_graphs_are_fast_enough() {
        let g = complete_bipartite(6, 6);
        let h = g.relabeled(&[3, 1, 4, 0, 5, 2], &[2, 5, 0, 1, 4, 3]);
        assert!(are_isomorphic(&g, &h));
        // two disjoint K_{2,2}s vs an 8-cycle: same degree sequences
        let two_k22 = BipartiteGraph::new(
            4,
            4,
            vec![(0, 0), (0, 1), (1, 0), (1, 1), (2, 2), (2, 3), (3, 2), (3, 3)],
        )
        .unwrap();
        let cycle8 = BipartiteGraph::new(
            4,
            4,
            vec![(0, 0), (1, 0), (1, 1), (2, 1), (2, 2), (3, 2), (3, 3), (0, 3)],
        )
        .unwrap();
        assert_eq!(
            two_k22.degree_sequences(),
            cycle8.degree_sequences()
        );
        assert!(!are_isomorphic(&two_k22, &cycle8));
    }

    #[test]
    fn non_twin_symmetry_is_handled() {
        // 8-cycle relabeled: rotations are automorphic but not twins
        let cycle8 = BipartiteGraph::new(
            4,
            4,
            vec![(0, 0), (1, 0), (1, 1), (2, 1), (2, 2), (3, 2), (3, 3), (0, 3)],
        )
        .unwrap();
        let h = cycle8.relabeled(&[2, 0, 3, 1], &[1, 3, 0, 2]);
        assert!(are_isomorphic(&cycle8, &h));
    }
}
