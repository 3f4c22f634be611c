//! Weighted undirected multigraphs with stable edge identities, closed walks
//! and k-walk solutions.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result, VerifyError};

pub type Vertex = usize;
pub type Weight = u64;

/// Stable edge identity. Ids are assigned in insertion order starting at 1
/// and are never reused within one graph value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u32);

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    pub u: Vertex,
    pub v: Vertex,
    pub weight: Weight,
}

impl Edge {
    /// The endpoint opposite to `x`. `x` must be an endpoint.
    #[inline]
    pub fn other(&self, x: Vertex) -> Vertex {
        debug_assert!(self.touches(x));
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }

    #[inline]
    pub fn touches(&self, x: Vertex) -> bool {
        self.u == x || self.v == x
    }
}

/// Weighted undirected multigraph. Parallel edges are allowed, loops are not.
/// Edges are kept sorted by id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiGraph {
    vertex_count: usize,
    edges: Vec<Edge>,
    next_id: u32,
}

impl MultiGraph {
    pub fn new(vertex_count: usize) -> Self {
        Self { vertex_count, edges: Vec::new(), next_id: 1 }
    }

    /// Builds a graph from `(u, v, weight)` triples with 0-based vertices.
    /// Edge ids are 1, 2, ... in slice order.
    pub fn from_edges(vertex_count: usize, edges: &[(Vertex, Vertex, Weight)]) -> Result<Self> {
        let mut g = Self::new(vertex_count);
        for &(u, v, w) in edges {
            g.add_edge(u, v, w)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: Vertex, v: Vertex, weight: Weight) -> Result<EdgeId> {
        for x in [u, v] {
            if x >= self.vertex_count {
                return Err(Error::VertexOutOfRange { vertex: x, vertex_count: self.vertex_count });
            }
        }
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        let id = EdgeId(self.next_id);
        self.next_id += 1;
        self.edges.push(Edge { id, u, v, weight });
        Ok(id)
    }

    /// Assembles a graph from already validated parts. `edges` must be sorted
    /// by id, loop-free, in range, and every id must be below `next_id`.
    pub(crate) fn from_parts(vertex_count: usize, edges: Vec<Edge>, next_id: u32) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0].id < w[1].id));
        debug_assert!(edges.iter().all(|e| e.u != e.v && e.u < vertex_count && e.v < vertex_count));
        debug_assert!(edges.last().map_or(true, |e| e.id.0 < next_id));
        Self { vertex_count, edges, next_id }
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// The id the next inserted edge will receive.
    pub fn next_edge_id(&self) -> EdgeId {
        EdgeId(self.next_id)
    }

    /// Index of `id` in [`edges`](Self::edges).
    pub fn position(&self, id: EdgeId) -> Option<usize> {
        self.edges.binary_search_by_key(&id, |e| e.id).ok()
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.position(id).map(|i| &self.edges[i])
    }

    pub fn incident(&self, x: Vertex) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.iter().filter(move |e| e.touches(x))
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count];
        for e in &self.edges {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        deg
    }

    pub fn degree(&self, x: Vertex) -> usize {
        self.incident(x).count()
    }

    pub fn total_weight(&self) -> Weight {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Minimum-weight edge; the lowest id wins ties.
    pub fn min_weight_edge(&self) -> Option<&Edge> {
        self.edges.iter().min_by_key(|e| (e.weight, e.id))
    }

    /// True when `m · max_weight · (2k + 2)` fits in 64 bits, which bounds
    /// every solution weight this crate produces for parameter `k`.
    pub fn weights_fit(&self, k: usize) -> bool {
        let max_w = self.edges.iter().map(|e| e.weight).max().unwrap_or(0);
        (self.edges.len() as u64)
            .checked_mul(max_w)
            .and_then(|x| x.checked_mul(2 * k as u64 + 2))
            .is_some()
    }

    pub fn degree_classes(&self) -> DegreeClasses {
        let mut classes = DegreeClasses::default();
        for (x, d) in self.degrees().into_iter().enumerate() {
            match d {
                0 => {}
                1 => classes.v1.push(x),
                2 => classes.v2.push(x),
                _ => classes.v3plus.push(x),
            }
        }
        classes
    }

    /// Whether every vertex of positive degree lies in one component.
    /// Graphs without edges count as connected.
    pub fn is_connected(&self) -> bool {
        let Some(first) = self.edges.first() else {
            return true;
        };
        let mut dsu = Dsu::new(self.vertex_count);
        for e in &self.edges {
            dsu.union(e.u, e.v);
        }
        let root = dsu.find(first.u);
        self.edges.iter().all(|e| dsu.find(e.u) == root)
    }

    /// Replaces the two edges at degree-2 vertex `x` by one edge carrying the
    /// summed weight. `x` stays in the graph as an isolated vertex.
    pub fn bypass(&self, x: Vertex) -> Result<Bypass> {
        if x >= self.vertex_count {
            return Err(Error::VertexOutOfRange { vertex: x, vertex_count: self.vertex_count });
        }
        let inc: Vec<usize> = (0..self.edges.len()).filter(|&i| self.edges[i].touches(x)).collect();
        if inc.len() != 2 {
            return Err(Error::NotDegreeTwo { vertex: x, degree: inc.len() });
        }
        let (first, second) = (self.edges[inc[0]], self.edges[inc[1]]);
        let (u, w) = (first.other(x), second.other(x));
        if u == w {
            return Err(Error::BypassLoop(x));
        }
        let new_id = EdgeId(self.next_id);
        let mut edges: Vec<Edge> = self
            .edges
            .iter()
            .filter(|e| e.id != first.id && e.id != second.id)
            .copied()
            .collect();
        edges.push(Edge { id: new_id, u, v: w, weight: first.weight + second.weight });
        Ok(Bypass {
            graph: Self::from_parts(self.vertex_count, edges, self.next_id + 1),
            new_edge: new_id,
            replaced: [first.id, second.id],
        })
    }
}

/// Result of [`MultiGraph::bypass`]. `replaced` lists the removed edges in
/// traversal order from the new edge's `u` endpoint.
#[derive(Debug, Clone)]
pub struct Bypass {
    pub graph: MultiGraph,
    pub new_edge: EdgeId,
    pub replaced: [EdgeId; 2],
}

/// Partition of the non-isolated vertices by degree (parallel edges counted).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DegreeClasses {
    pub v1: Vec<Vertex>,
    pub v2: Vec<Vertex>,
    pub v3plus: Vec<Vertex>,
}

/// Closed walk. Step `(x, e)` leaves `x` along edge `e`; the last edge
/// returns to the first vertex.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Walk {
    steps: Vec<(Vertex, EdgeId)>,
}

impl Walk {
    pub fn new(steps: Vec<(Vertex, EdgeId)>) -> Self {
        Self { steps }
    }

    pub fn steps(&self) -> &[(Vertex, EdgeId)] {
        &self.steps
    }

    pub fn into_steps(self) -> Vec<(Vertex, EdgeId)> {
        self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn start(&self) -> Option<Vertex> {
        self.steps.first().map(|s| s.0)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.steps.iter().map(|s| s.1)
    }

    /// Sum of traversed edge weights; `None` if an edge is missing from `g`.
    pub fn weight(&self, g: &MultiGraph) -> Option<Weight> {
        self.steps.iter().map(|&(_, e)| g.edge(e).map(|e| e.weight)).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub walks: Vec<Walk>,
    pub total_weight: Weight,
}

/// Checks that `s` is a valid k-walk cover of `g` and returns its weight.
pub fn verify_solution(g: &MultiGraph, k: usize, s: &Solution) -> Result<Weight, VerifyError> {
    if s.walks.len() != k {
        return Err(VerifyError::WrongWalkCount { expected: k, found: s.walks.len() });
    }
    let mut covered = vec![false; g.edge_count()];
    let mut total: Weight = 0;
    for (wi, walk) in s.walks.iter().enumerate() {
        let steps = walk.steps();
        if steps.is_empty() {
            return Err(VerifyError::EmptyWalk { walk: wi });
        }
        for (i, &(x, id)) in steps.iter().enumerate() {
            let pos = g
                .position(id)
                .ok_or(VerifyError::UnknownEdge { walk: wi, step: i, edge: id })?;
            let e = &g.edges()[pos];
            if !e.touches(x) {
                return Err(VerifyError::BrokenAdjacency { walk: wi, step: i, edge: id });
            }
            let next = steps[(i + 1) % steps.len()].0;
            if e.other(x) != next {
                return Err(if i + 1 == steps.len() {
                    VerifyError::NotClosed { walk: wi }
                } else {
                    VerifyError::BrokenAdjacency { walk: wi, step: i, edge: id }
                });
            }
            covered[pos] = true;
            total += e.weight;
        }
    }
    if let Some(pos) = covered.iter().position(|c| !c) {
        return Err(VerifyError::Uncovered(g.edges()[pos].id));
    }
    if total != s.total_weight {
        return Err(VerifyError::WeightMismatch { claimed: s.total_weight, actual: total });
    }
    Ok(total)
}

/// Union-find with path halving.
pub(crate) struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> MultiGraph {
        MultiGraph::from_edges(3, &[(0, 1, 1), (1, 2, 1), (2, 0, 1)]).unwrap()
    }

    #[test]
    fn degree_classes_by_definition() {
        let path = MultiGraph::from_edges(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1)]).unwrap();
        let c = path.degree_classes();
        assert_eq!(c.v1, vec![0, 3]);
        assert_eq!(c.v2, vec![1, 2]);
        assert!(c.v3plus.is_empty());

        let c = triangle().degree_classes();
        assert!(c.v1.is_empty());
        assert_eq!(c.v2, vec![0, 1, 2]);

        let star = MultiGraph::from_edges(4, &[(0, 1, 1), (0, 2, 1), (0, 3, 1)]).unwrap();
        let c = star.degree_classes();
        assert_eq!(c.v1, vec![1, 2, 3]);
        assert_eq!(c.v3plus, vec![0]);
    }

    #[test]
    fn loops_and_ranges_rejected() {
        let mut g = MultiGraph::new(2);
        assert_eq!(g.add_edge(1, 1, 1), Err(Error::SelfLoop(1)));
        assert!(matches!(g.add_edge(0, 2, 1), Err(Error::VertexOutOfRange { .. })));
        assert_eq!(g.add_edge(0, 1, 1), Ok(EdgeId(1)));
        assert_eq!(g.add_edge(1, 0, 1), Ok(EdgeId(2)));
    }

    #[test]
    fn bypass_path_middle() {
        let g = MultiGraph::from_edges(3, &[(0, 1, 2), (1, 2, 3)]).unwrap();
        let b = g.bypass(1).unwrap();
        assert_eq!(b.graph.edge_count(), 1);
        let e = b.graph.edges()[0];
        assert_eq!((e.u, e.v, e.weight), (0, 2, 5));
        assert_eq!(e.id, b.new_edge);
        assert_eq!(b.replaced, [EdgeId(1), EdgeId(2)]);
        assert_eq!(b.graph.degree(1), 0);
        assert_eq!(b.graph.degree_classes().v1, vec![0, 2]);
    }

    #[test]
    fn bypass_triangle_makes_parallel_pair() {
        let g = MultiGraph::from_edges(3, &[(0, 1, 1), (1, 2, 2), (2, 0, 4)]).unwrap();
        let b = g.bypass(1).unwrap();
        let mut ws: Vec<_> = b.graph.edges().iter().map(|e| e.weight).collect();
        ws.sort();
        assert_eq!(ws, vec![3, 4]);
        assert!(b.graph.edges().iter().all(|e| (e.u.min(e.v), e.u.max(e.v)) == (0, 2)));
    }

    #[test]
    fn bypass_errors() {
        let g = MultiGraph::from_edges(2, &[(0, 1, 1), (0, 1, 1)]).unwrap();
        assert_eq!(g.bypass(0).unwrap_err(), Error::BypassLoop(0));
        let star = MultiGraph::from_edges(4, &[(0, 1, 1), (0, 2, 1), (0, 3, 1)]).unwrap();
        assert_eq!(star.bypass(0).unwrap_err(), Error::NotDegreeTwo { vertex: 0, degree: 3 });
    }

    #[test]
    fn connectivity_ignores_isolated() {
        assert!(triangle().is_connected());
        let two = MultiGraph::from_edges(4, &[(0, 1, 1), (2, 3, 1)]).unwrap();
        assert!(!two.is_connected());
        let iso = MultiGraph::from_edges(3, &[(0, 1, 1)]).unwrap();
        assert!(iso.is_connected());
    }

    #[test]
    fn verify_examples() {
        let g = triangle();
        let tour = Walk::new(vec![(0, EdgeId(1)), (1, EdgeId(2)), (2, EdgeId(3))]);
        let s = Solution { walks: vec![tour.clone()], total_weight: 3 };
        assert_eq!(verify_solution(&g, 1, &s), Ok(3));

        let s2 = Solution { walks: vec![tour, Walk::default()], total_weight: 3 };
        assert_eq!(verify_solution(&g, 2, &s2), Err(VerifyError::EmptyWalk { walk: 1 }));

        let edge = MultiGraph::from_edges(2, &[(0, 1, 1)]).unwrap();
        let back = Walk::new(vec![(0, EdgeId(1)), (1, EdgeId(1))]);
        let s = Solution { walks: vec![back], total_weight: 2 };
        assert_eq!(verify_solution(&edge, 1, &s), Ok(2));
    }

    #[test]
    fn verify_rejections() {
        let g = triangle();
        let open = Walk::new(vec![(0, EdgeId(1)), (1, EdgeId(2))]);
        let s = Solution { walks: vec![open], total_weight: 2 };
        assert_eq!(verify_solution(&g, 1, &s), Err(VerifyError::NotClosed { walk: 0 }));

        let back = Walk::new(vec![(0, EdgeId(1)), (1, EdgeId(1))]);
        let s = Solution { walks: vec![back.clone()], total_weight: 2 };
        assert_eq!(verify_solution(&g, 1, &s), Err(VerifyError::Uncovered(EdgeId(2))));
        assert!(matches!(
            verify_solution(&g, 2, &s),
            Err(VerifyError::WrongWalkCount { expected: 2, found: 1 })
        ));

        let tour = Walk::new(vec![(0, EdgeId(1)), (1, EdgeId(2)), (2, EdgeId(3))]);
        let s = Solution { walks: vec![tour], total_weight: 4 };
        assert_eq!(
            verify_solution(&g, 1, &s),
            Err(VerifyError::WeightMismatch { claimed: 4, actual: 3 })
        );

        let broken = Walk::new(vec![(0, EdgeId(2)), (2, EdgeId(3))]);
        let s = Solution { walks: vec![broken], total_weight: 2 };
        assert!(matches!(verify_solution(&g, 1, &s), Err(VerifyError::BrokenAdjacency { .. })));
    }
}
