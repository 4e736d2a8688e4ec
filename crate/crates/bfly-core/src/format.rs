//! The `bip v1` edge-list text format.
//!
//! ```text
//! bip 1
//! L <left_count>
//! R <right_count>
//! e <u> <a>
//! ```
//!
//! Writers emit edges sorted by (left, right), so output is deterministic for
//! a given labeled graph. Catalog files concatenate several blocks back to
//! back, each starting with its own `bip 1` header.

use std::collections::HashSet;

use thiserror::Error;

use crate::graph::BipartiteGraph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct BipParseError {
    pub line: usize,
    pub kind: BipParseErrorKind,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BipParseErrorKind {
    #[error("expected header `bip 1`")]
    BadHeader,
    #[error("expected `L <count>`")]
    BadLeftCount,
    #[error("expected `R <count>`")]
    BadRightCount,
    #[error("expected `e <u> <a>`")]
    BadEdgeLine,
    #[error("edge ({0}, {1}) out of range")]
    EdgeOutOfRange(usize, usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("unexpected end of input")]
    UnexpectedEnd,
}

fn err(line: usize, kind: BipParseErrorKind) -> BipParseError {
    BipParseError { line, kind }
}

pub fn write_bip(g: &BipartiteGraph) -> String {
    let mut out = String::new();
    out.push_str("bip 1\n");
    out.push_str(&format!("L {}\n", g.left_count()));
    out.push_str(&format!("R {}\n", g.right_count()));
    for &(u, a) in g.edges() {
        out.push_str(&format!("e {} {}\n", u, a));
    }
    out
}

/// Parses a single `bip v1` graph; trailing content is an error.
pub fn parse_bip(text: &str) -> Result<BipartiteGraph, BipParseError> {
    let mut lines = text.lines().enumerate().peekable();
    let g = parse_block(&mut lines)?;
    if let Some(&(i, _)) = lines.peek() {
        return Err(err(i + 1, BipParseErrorKind::BadHeader));
    }
    Ok(g)
}

/// Parses a concatenation of `bip v1` blocks (possibly none).
pub fn parse_bip_blocks(text: &str) -> Result<Vec<BipartiteGraph>, BipParseError> {
    let mut lines = text.lines().enumerate().peekable();
    let mut graphs = Vec::new();
    while lines.peek().is_some() {
        graphs.push(parse_block(&mut lines)?);
    }
    Ok(graphs)
}

type Lines<'a> = std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>;

fn parse_block(lines: &mut Lines) -> Result<BipartiteGraph, BipParseError> {
    let (i, header) = lines.next().ok_or(err(0, BipParseErrorKind::UnexpectedEnd))?;
    let header_line = i + 1;
    if header.split_whitespace().collect::<Vec<_>>() != ["bip", "1"] {
        return Err(err(header_line, BipParseErrorKind::BadHeader));
    }
    let left_count = parse_count(lines, "L", BipParseErrorKind::BadLeftCount)?;
    let right_count = parse_count(lines, "R", BipParseErrorKind::BadRightCount)?;

    let mut edges = Vec::new();
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    while let Some(&(i, line)) = lines.peek() {
        let lineno = i + 1;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.first() == Some(&"bip") {
            break; // next block
        }
        lines.next();
        if toks.len() != 3 || toks[0] != "e" {
            return Err(err(lineno, BipParseErrorKind::BadEdgeLine));
        }
        let u: usize = toks[1]
            .parse()
            .map_err(|_| err(lineno, BipParseErrorKind::BadEdgeLine))?;
        let a: usize = toks[2]
            .parse()
            .map_err(|_| err(lineno, BipParseErrorKind::BadEdgeLine))?;
        if u >= left_count || a >= right_count {
            return Err(err(lineno, BipParseErrorKind::EdgeOutOfRange(u, a)));
        }
        if !seen.insert((u, a)) {
            return Err(err(lineno, BipParseErrorKind::DuplicateEdge(u, a)));
        }
        edges.push((u, a));
    }
    Ok(BipartiteGraph::new(left_count, right_count, edges)
        .expect("edges were validated line by line"))
}

fn parse_count(
    lines: &mut Lines,
    tag: &str,
    kind: BipParseErrorKind,
) -> Result<usize, BipParseError> {
    let (i, line) = lines.next().ok_or(err(0, BipParseErrorKind::UnexpectedEnd))?;
    let lineno = i + 1;
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() != 2 || toks[0] != tag {
        return Err(err(lineno, kind));
    }
    toks[1].parse().map_err(|_| err(lineno, kind))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_bipartite, random_bipartite};
    use proptest::prelude::*;

    #[test]
    fn writes_expected_text() {
        let g = complete_bipartite(2, 2);
        assert_eq!(write_bip(&g), "bip 1\nL 2\nR 2\ne 0 0\ne 0 1\ne 1 0\ne 1 1\n");
    }

    #[test]
    fn rejects_malformed_lines_with_line_numbers() {
        let e = parse_bip("bip 2\n").unwrap_err();
        assert_eq!((e.line, e.kind), (1, BipParseErrorKind::BadHeader));

        let e = parse_bip("bip 1\nL x\n").unwrap_err();
        assert_eq!((e.line, e.kind), (2, BipParseErrorKind::BadLeftCount));

        let e = parse_bip("bip 1\nL 2\nR 2\ne 0\n").unwrap_err();
        assert_eq!((e.line, e.kind), (4, BipParseErrorKind::BadEdgeLine));

        let e = parse_bip("bip 1\nL 2\nR 2\ne 0 5\n").unwrap_err();
        assert_eq!((e.line, e.kind), (4, BipParseErrorKind::EdgeOutOfRange(0, 5)));

        let e = parse_bip("bip 1\nL 2\nR 2\ne 0 0\ne 0 0\n").unwrap_err();
        assert_eq!((e.line, e.kind), (5, BipParseErrorKind::DuplicateEdge(0, 0)));
    }

    #[test]
    fn parses_empty_edge_set() {
        let g = parse_bip("bip 1\nL 3\nR 2\n").unwrap();
        assert_eq!(g.left_count(), 3);
        assert_eq!(g.right_count(), 2);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn parses_concatenated_blocks() {
        let a = complete_bipartite(2, 2);
        let b = complete_bipartite(1, 3);
        let text = format!("{}{}", write_bip(&a), write_bip(&b));
        let parsed = parse_bip_blocks(&text).unwrap();
        assert_eq!(parsed, vec![a, b]);
    }

    proptest! {
        #[test]
        fn round_trip(seed in any::<u64>(), l in 1usize..9, r in 1usize..9) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let g = random_bipartite(l, r, 0.4, &mut rng);
            let parsed = parse_bip(&write_bip(&g)).unwrap();
            prop_assert_eq!(parsed, g);
        }
    }
}
