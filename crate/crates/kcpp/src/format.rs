//! Line-oriented text formats: undirected instances, directed instances,
//! solutions, and kernel expansion sidecars. Vertices are 1-based on disk.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use kcpp_core::{DiGraph, EdgeId, ExpansionMap, MultiGraph, Solution, Walk, Weight};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("missing header line")]
    MissingHeader,
    #[error("header announces {expected} {what}, found {found}")]
    Count { what: &'static str, expected: usize, found: usize },
    #[error("edge weights may overflow 64 bits for k = {0}")]
    Overflow(usize),
    #[error(transparent)]
    Graph(#[from] kcpp_core::Error),
}

fn line_err(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Line { line, msg: msg.into() }
}

/// Non-empty, non-comment lines with their 1-based line numbers.
fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.trim();
        if l.is_empty() || l.starts_with('#') {
            None
        } else {
            Some((i + 1, l.split_whitespace().collect()))
        }
    })
}

fn num<T: std::str::FromStr>(line: usize, tok: Option<&&str>, what: &str) -> Result<T, ParseError> {
    let tok = tok.ok_or_else(|| line_err(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| line_err(line, format!("bad {what} `{tok}`")))
}

fn vertex(line: usize, tok: Option<&&str>, n: usize) -> Result<usize, ParseError> {
    let v: usize = num(line, tok, "vertex")?;
    if v == 0 || v > n {
        return Err(line_err(line, format!("vertex {v} outside 1..={n}")));
    }
    Ok(v - 1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub graph: MultiGraph,
    pub k: usize,
    pub budget: Option<Weight>,
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut header: Option<(usize, usize, usize, Option<Weight>)> = None;
    let mut graph = MultiGraph::new(0);
    for (line, toks) in records(text) {
        match toks[0] {
            "p" => {
                if header.is_some() {
                    return Err(line_err(line, "second header"));
                }
                if toks.get(1) != Some(&"kcpp") {
                    return Err(line_err(line, "expected `p kcpp <n> <m> <k> [p]`"));
                }
                if toks.len() > 6 {
                    return Err(line_err(line, "trailing tokens in header"));
                }
                let n = num(line, toks.get(2), "vertex count")?;
                let m = num(line, toks.get(3), "edge count")?;
                let k = num(line, toks.get(4), "k")?;
                if k == 0 {
                    return Err(line_err(line, "k must be at least 1"));
                }
                let p = toks.get(5).map(|_| num(line, toks.get(5), "budget")).transpose()?;
                header = Some((n, m, k, p));
                graph = MultiGraph::new(n);
            }
            "e" => {
                let (n, ..) = header.ok_or(ParseError::MissingHeader)?;
                if toks.len() != 4 {
                    return Err(line_err(line, "expected `e <u> <v> <w>`"));
                }
                let u = vertex(line, toks.get(1), n)?;
                let v = vertex(line, toks.get(2), n)?;
                let w: Weight = num(line, toks.get(3), "weight")?;
                graph.add_edge(u, v, w).map_err(|e| line_err(line, e.to_string()))?;
            }
            other => return Err(line_err(line, format!("unknown record `{other}`"))),
        }
    }
    let (_, m, k, budget) = header.ok_or(ParseError::MissingHeader)?;
    if graph.edge_count() != m {
        return Err(ParseError::Count { what: "edges", expected: m, found: graph.edge_count() });
    }
    if !graph.weights_fit(k) {
        return Err(ParseError::Overflow(k));
    }
    Ok(Instance { graph, k, budget })
}

/// Edges are written in id order, so ids are renumbered 1.. on re-parse.
pub fn write_instance(inst: &Instance) -> String {
    let g = &inst.graph;
    let mut s = format!("p kcpp {} {} {}", g.vertex_count(), g.edge_count(), inst.k);
    if let Some(p) = inst.budget {
        write!(s, " {p}").unwrap();
    }
    s.push('\n');
    for e in g.edges() {
        writeln!(s, "e {} {} {}", e.u + 1, e.v + 1, e.weight).unwrap();
    }
    s
}

pub fn write_solution(s: &Solution, k: usize) -> String {
    let mut out = format!("s {} {}\n", s.total_weight, k);
    for w in &s.walks {
        write!(out, "w {}", w.len()).unwrap();
        for &(v, e) in w.steps() {
            write!(out, " {} {}", v + 1, e.0).unwrap();
        }
        let end = w.start().map_or(0, |v| v + 1);
        writeln!(out, " {end}").unwrap();
    }
    out
}

/// Reads a solution file. Consecutive vertices are taken as written; the
/// caller checks them against a graph with `verify_solution`.
pub fn parse_solution(text: &str) -> Result<(Solution, usize), ParseError> {
    let mut head: Option<(Weight, usize)> = None;
    let mut walks = Vec::new();
    for (line, toks) in records(text) {
        match toks[0] {
            "s" => {
                if head.is_some() {
                    return Err(line_err(line, "second `s` line"));
                }
                head = Some((num(line, toks.get(1), "total weight")?, num(line, toks.get(2), "k")?));
            }
            "w" => {
                let steps: usize = num(line, toks.get(1), "step count")?;
                if toks.len() != 2 * steps + 3 {
                    return Err(line_err(line, format!("walk of {steps} steps needs {} tokens", 2 * steps + 3)));
                }
                let mut w = Vec::with_capacity(steps);
                for i in 0..steps {
                    let v: usize = num(line, toks.get(2 + 2 * i), "vertex")?;
                    let e: u32 = num(line, toks.get(3 + 2 * i), "edge id")?;
                    if v == 0 {
                        return Err(line_err(line, "vertices are 1-based"));
                    }
                    w.push((v - 1, EdgeId(e)));
                }
                let last: usize = num(line, toks.last(), "vertex")?;
                if steps > 0 && last != w[0].0 + 1 {
                    return Err(line_err(line, "walk does not end where it starts"));
                }
                walks.push(Walk::new(w));
            }
            other => return Err(line_err(line, format!("unknown record `{other}`"))),
        }
    }
    let (total_weight, k) = head.ok_or(ParseError::MissingHeader)?;
    Ok((Solution { walks, total_weight }, k))
}

/// `x <kernel edge> <original edges...>` per kernel edge, then
/// `v <kernel vertex> <original vertex>` per kernel vertex.
pub fn write_expansion(x: &ExpansionMap) -> String {
    let mut s = String::new();
    for (kid, orig) in &x.edges {
        write!(s, "x {}", kid.0).unwrap();
        for id in orig {
            write!(s, " {}", id.0).unwrap();
        }
        s.push('\n');
    }
    for (kv, ov) in x.vertex_map.iter().enumerate() {
        writeln!(s, "v {} {}", kv + 1, ov + 1).unwrap();
    }
    s
}

pub fn parse_expansion(text: &str) -> Result<ExpansionMap, ParseError> {
    let mut edges = BTreeMap::new();
    let mut vertices = BTreeMap::new();
    for (line, toks) in records(text) {
        match toks[0] {
            "x" => {
                let kid: u32 = num(line, toks.get(1), "kernel edge id")?;
                let orig = toks[2..]
                    .iter()
                    .map(|t| t.parse().map(EdgeId).map_err(|_| line_err(line, format!("bad edge id `{t}`"))))
                    .collect::<Result<Vec<_>, _>>()?;
                if orig.is_empty() {
                    return Err(line_err(line, "kernel edge expands to nothing"));
                }
                edges.insert(EdgeId(kid), orig);
            }
            "v" => {
                let kv: usize = num(line, toks.get(1), "kernel vertex")?;
                let ov: usize = num(line, toks.get(2), "original vertex")?;
                if kv == 0 || ov == 0 {
                    return Err(line_err(line, "vertices are 1-based"));
                }
                vertices.insert(kv - 1, ov - 1);
            }
            other => return Err(line_err(line, format!("unknown record `{other}`"))),
        }
    }
    let vertex_map: Vec<usize> = vertices.values().copied().collect();
    if vertices.keys().copied().ne(0..vertex_map.len()) {
        return Err(line_err(0, "kernel vertices are not numbered 1..n"));
    }
    Ok(ExpansionMap { vertex_map, edges })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedInstance {
    pub digraph: DiGraph,
    pub k: usize,
}

pub fn parse_directed(text: &str) -> Result<DirectedInstance, ParseError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut d = DiGraph::new(0);
    for (line, toks) in records(text) {
        match toks[0] {
            "p" => {
                if header.is_some() {
                    return Err(line_err(line, "second header"));
                }
                if toks.get(1) != Some(&"dkcpp") || toks.len() != 5 {
                    return Err(line_err(line, "expected `p dkcpp <n> <m> <k>`"));
                }
                let n = num(line, toks.get(2), "vertex count")?;
                header = Some((n, num(line, toks.get(3), "arc count")?, num(line, toks.get(4), "k")?));
                d = DiGraph::new(n);
            }
            "a" => {
                let (n, ..) = header.ok_or(ParseError::MissingHeader)?;
                if toks.len() != 4 {
                    return Err(line_err(line, "expected `a <tail> <head> <w>`"));
                }
                let t = vertex(line, toks.get(1), n)?;
                let h = vertex(line, toks.get(2), n)?;
                let w: Weight = num(line, toks.get(3), "weight")?;
                d.add_arc(t, h, w).map_err(|e| line_err(line, e.to_string()))?;
            }
            other => return Err(line_err(line, format!("unknown record `{other}`"))),
        }
    }
    let (_, m, k) = header.ok_or(ParseError::MissingHeader)?;
    if d.arc_count() != m {
        return Err(ParseError::Count { what: "arcs", expected: m, found: d.arc_count() });
    }
    Ok(DirectedInstance { digraph: d, k })
}

pub fn write_directed(inst: &DirectedInstance) -> String {
    let d = &inst.digraph;
    let mut s = format!("p dkcpp {} {} {}\n", d.vertex_count(), d.arc_count(), inst.k);
    for a in d.arcs() {
        writeln!(s, "a {} {} {}", a.tail + 1, a.head + 1, a.weight).unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRIANGLE: &str = "# unit triangle\np kcpp 3 3 2 4\ne 1 2 1\ne 2 3 1\n\ne 3 1 1\n";

    #[test]
    fn instance_round_trip() {
        let inst = parse_instance(TRIANGLE).unwrap();
        assert_eq!(inst.k, 2);
        assert_eq!(inst.budget, Some(4));
        assert_eq!(inst.graph.edge_count(), 3);
        assert_eq!(parse_instance(&write_instance(&inst)).unwrap(), inst);
    }

    #[test]
    fn instance_errors() {
        assert_eq!(parse_instance("e 1 2 1\n"), Err(ParseError::MissingHeader));
        assert!(matches!(parse_instance("p kcpp 2 1 1\ne 1 1 3\n"), Err(ParseError::Line { line: 2, .. })));
        assert!(matches!(parse_instance("p kcpp 2 1 1\ne 1 3 3\n"), Err(ParseError::Line { line: 2, .. })));
        assert!(matches!(parse_instance("p kcpp 2 2 1\ne 1 2 3\n"), Err(ParseError::Count { .. })));
        assert!(matches!(parse_instance("p kcpp 2 1 1\ne 1 2 -3\n"), Err(ParseError::Line { .. })));
        let huge = format!("p kcpp 2 1 1\ne 1 2 {}\n", u64::MAX / 2);
        assert_eq!(parse_instance(&huge), Err(ParseError::Overflow(1)));
    }

    #[test]
    fn solution_round_trip() {
        let s = Solution {
            walks: vec![Walk::new(vec![(0, EdgeId(1)), (1, EdgeId(2)), (2, EdgeId(3))])],
            total_weight: 3,
        };
        let text = write_solution(&s, 1);
        assert_eq!(text, "s 3 1\nw 3 1 1 2 2 3 3 1\n");
        assert_eq!(parse_solution(&text).unwrap(), (s, 1));
        assert!(parse_solution("s 3 1\nw 3 1 1 2 2 3 3 2\n").is_err());
    }

    #[test]
    fn expansion_round_trip() {
        let x = ExpansionMap {
            vertex_map: vec![0, 3],
            edges: [(EdgeId(1), vec![EdgeId(4), EdgeId(2)]), (EdgeId(2), vec![EdgeId(1)])].into_iter().collect(),
        };
        let text = write_expansion(&x);
        assert!(text.starts_with("x 1 4 2\nx 2 1\n"));
        assert_eq!(parse_expansion(&text).unwrap(), x);
    }

    #[test]
    fn directed_round_trip() {
        let inst = parse_directed("p dkcpp 3 2 1\na 1 2 1\na 2 3 5\n").unwrap();
        assert_eq!(inst.digraph.arc_count(), 2);
        assert_eq!(parse_directed(&write_directed(&inst)).unwrap(), inst);
        assert!(parse_directed("p dkcpp 2 1 1\na 2 2 1\n").is_err());
    }
}
