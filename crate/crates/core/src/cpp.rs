//! Exact Chinese Postman: minimum-weight join over the odd-degree vertices,
//! edge duplication, and Euler tour extraction.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, MultiGraph, Vertex, Walk, Weight};
use crate::matching::min_cost_perfect_matching;

/// Per-edge traversal counts over a base graph, indexed like
/// [`MultiGraph::edges`]. Counts of zero are allowed so that residual
/// multigraphs (after removing cycles) use the same type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multiplicities<'g> {
    graph: &'g MultiGraph,
    counts: Vec<u32>,
}

impl<'g> Multiplicities<'g> {
    pub fn uniform(graph: &'g MultiGraph, count: u32) -> Self {
        Self { graph, counts: vec![count; graph.edge_count()] }
    }

    pub fn from_counts(graph: &'g MultiGraph, counts: Vec<u32>) -> Self {
        assert_eq!(counts.len(), graph.edge_count(), "one count per edge");
        Self { graph, counts }
    }

    #[inline]
    pub fn graph(&self) -> &'g MultiGraph {
        self.graph
    }

    #[inline]
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn count(&self, id: EdgeId) -> u32 {
        self.graph.position(id).map_or(0, |p| self.counts[p])
    }

    pub(crate) fn counts_mut(&mut self) -> &mut Vec<u32> {
        &mut self.counts
    }

    /// Total number of edge copies.
    pub fn copies(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    pub fn weight(&self) -> Weight {
        self.graph.edges().iter().zip(&self.counts).map(|(e, &c)| e.weight * c as Weight).sum()
    }

    /// Degrees counting copies.
    pub fn degrees(&self) -> Vec<u64> {
        let mut deg = vec![0u64; self.graph.vertex_count()];
        for (e, &c) in self.graph.edges().iter().zip(&self.counts) {
            deg[e.u] += c as u64;
            deg[e.v] += c as u64;
        }
        deg
    }

    pub fn is_even(&self) -> bool {
        self.degrees().iter().all(|d| d % 2 == 0)
    }

    /// Every base edge has at least one copy.
    pub fn covers_all(&self) -> bool {
        self.counts.iter().all(|&c| c >= 1)
    }
}

/// Edge set whose duplication makes every degree even.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Join {
    /// Sorted, each id at most once.
    pub edges: Vec<EdgeId>,
    pub weight: Weight,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CppSolution<'g> {
    pub join: Join,
    /// 2 on join edges, 1 elsewhere.
    pub multiplicities: Multiplicities<'g>,
    pub weight: Weight,
}

pub fn odd_vertices(g: &MultiGraph) -> Vec<Vertex> {
    g.degrees().iter().enumerate().filter(|(_, &d)| d % 2 == 1).map(|(v, _)| v).collect()
}

fn adjacency(g: &MultiGraph) -> Vec<Vec<(Vertex, usize)>> {
    let mut adj = vec![Vec::new(); g.vertex_count()];
    for (pos, e) in g.edges().iter().enumerate() {
        adj[e.u].push((e.v, pos));
        adj[e.v].push((e.u, pos));
    }
    adj
}

/// Single-source shortest paths; returns distances and the edge position
/// used to reach each vertex.
fn dijkstra(adj: &[Vec<(Vertex, usize)>], cost: &[u128], src: Vertex) -> (Vec<u128>, Vec<usize>) {
    let n = adj.len();
    let mut dist = vec![u128::MAX; n];
    let mut pred = vec![usize::MAX; n];
    let mut heap = BinaryHeap::new();
    dist[src] = 0;
    heap.push(Reverse((0u128, src)));
    while let Some(Reverse((d, x))) = heap.pop() {
        if d > dist[x] {
            continue;
        }
        for &(y, pos) in &adj[x] {
            let nd = d + cost[pos];
            if nd < dist[y] {
                dist[y] = nd;
                pred[y] = pos;
                heap.push(Reverse((nd, y)));
            }
        }
    }
    (dist, pred)
}

/// Minimum-weight edge set whose odd-degree vertices are exactly `terminals`.
///
/// Paths are measured as `weight · (m + 1) + 1` per edge, so among
/// minimum-weight joins one with the fewest edges is returned.
pub fn min_weight_join(g: &MultiGraph, terminals: &[Vertex]) -> Result<Join> {
    let mut t: Vec<Vertex> = terminals.to_vec();
    t.sort_unstable();
    t.dedup();
    if t.len() % 2 == 1 {
        return Err(Error::OddTerminalCount(t.len()));
    }
    if let Some(&bad) = t.iter().find(|&&x| x >= g.vertex_count()) {
        return Err(Error::VertexOutOfRange { vertex: bad, vertex_count: g.vertex_count() });
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if t.is_empty() {
        return Ok(Join::default());
    }
    let adj = adjacency(g);
    let scale = g.edge_count() as u128 + 1;
    let cost: Vec<u128> = g.edges().iter().map(|e| e.weight as u128 * scale + 1).collect();
    let trees: Vec<(Vec<u128>, Vec<usize>)> = t.iter().map(|&s| dijkstra(&adj, &cost, s)).collect();
    if t.iter().any(|&y| trees[0].0[y] == u128::MAX) {
        // A terminal without incident edges cannot be reached.
        return Err(Error::Disconnected);
    }
    let mate = min_cost_perfect_matching(t.len(), |i, j| trees[i].0[t[j]]);

    let mut in_join = vec![false; g.edge_count()];
    for i in 0..t.len() {
        let j = mate[i];
        if i > j {
            continue;
        }
        let pred = &trees[i].1;
        let mut x = t[j];
        while x != t[i] {
            let pos = pred[x];
            in_join[pos] ^= true;
            x = g.edges()[pos].other(x);
        }
    }
    let mut join = Join::default();
    for (pos, e) in g.edges().iter().enumerate() {
        if in_join[pos] {
            join.edges.push(e.id);
            join.weight += e.weight;
        }
    }
    Ok(join)
}

/// Optimal single closed walk cover: every edge once, join edges twice.
pub fn solve_cpp(g: &MultiGraph) -> Result<CppSolution<'_>> {
    if g.edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let join = min_weight_join(g, &odd_vertices(g))?;
    let mut mult = Multiplicities::uniform(g, 1);
    for &id in &join.edges {
        let pos = g.position(id).ok_or(Error::Internal("join edge missing"))?;
        mult.counts_mut()[pos] = 2;
    }
    let weight = g.total_weight() + join.weight;
    debug_assert_eq!(weight, mult.weight());
    Ok(CppSolution { join, multiplicities: mult, weight })
}

/// Closed walk using every copy in the component of `start` exactly once.
/// At each vertex the lowest available edge id is taken first.
pub fn euler_tour(m: &Multiplicities<'_>, start: Vertex) -> Result<Walk> {
    let g = m.graph();
    if start >= g.vertex_count() {
        return Err(Error::VertexOutOfRange { vertex: start, vertex_count: g.vertex_count() });
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); g.vertex_count()];
    for (pos, e) in g.edges().iter().enumerate() {
        if m.counts()[pos] > 0 {
            adj[e.u].push(pos);
            adj[e.v].push(pos);
        }
    }
    if adj[start].is_empty() {
        return Err(Error::StartNotInComponent(start));
    }
    // Parity check over the component of start.
    let deg = m.degrees();
    let mut seen = vec![false; g.vertex_count()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(x) = stack.pop() {
        if deg[x] % 2 == 1 {
            return Err(Error::OddDegree(x));
        }
        for &pos in &adj[x] {
            let y = g.edges()[pos].other(x);
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }

    let mut remaining: Vec<u32> = m.counts().to_vec();
    let mut next = vec![0usize; g.vertex_count()];
    let mut stack: Vec<(Vertex, Option<EdgeId>)> = vec![(start, None)];
    let mut circuit: Vec<(Vertex, Option<EdgeId>)> = Vec::new();
    while let Some(&(x, _)) = stack.last() {
        while next[x] < adj[x].len() && remaining[adj[x][next[x]]] == 0 {
            next[x] += 1;
        }
        if next[x] < adj[x].len() {
            let pos = adj[x][next[x]];
            remaining[pos] -= 1;
            let e = &g.edges()[pos];
            stack.push((e.other(x), Some(e.id)));
        } else {
            circuit.push(stack.pop().unwrap());
        }
    }
    circuit.reverse();
    let steps = circuit
        .windows(2)
        .map(|w| (w[0].0, w[1].1.expect("only the root has no arrival edge")))
        .collect();
    Ok(Walk::new(steps))
}
