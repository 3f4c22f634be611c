//! Digraphs, the balancing construction that routes every degree surplus
//! through one extra vertex, and brute-force arc-disjoint cycle packing.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{Vertex, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arc {
    pub id: u32,
    pub tail: Vertex,
    pub head: Vertex,
    pub weight: Weight,
}

/// Directed multigraph; arc ids start at 1 in insertion order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DiGraph {
    vertex_count: usize,
    arcs: Vec<Arc>,
}

impl DiGraph {
    pub fn new(vertex_count: usize) -> Self {
        Self { vertex_count, arcs: Vec::new() }
    }

    pub fn from_arcs(vertex_count: usize, arcs: &[(Vertex, Vertex, Weight)]) -> Result<Self> {
        let mut d = Self::new(vertex_count);
        for &(t, h, w) in arcs {
            d.add_arc(t, h, w)?;
        }
        Ok(d)
    }

    pub fn add_arc(&mut self, tail: Vertex, head: Vertex, weight: Weight) -> Result<u32> {
        for x in [tail, head] {
            if x >= self.vertex_count {
                return Err(Error::VertexOutOfRange { vertex: x, vertex_count: self.vertex_count });
            }
        }
        if tail == head {
            return Err(Error::SelfLoop(tail));
        }
        let id = self.arcs.len() as u32 + 1;
        self.arcs.push(Arc { id, tail, head, weight });
        Ok(id)
    }

    pub fn add_vertex(&mut self) -> Vertex {
        self.vertex_count += 1;
        self.vertex_count - 1
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertex_count];
        for a in &self.arcs {
            d[a.tail] += 1;
        }
        d
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertex_count];
        for a in &self.arcs {
            d[a.head] += 1;
        }
        d
    }

    pub fn is_balanced(&self) -> bool {
        self.out_degrees() == self.in_degrees()
    }

    pub fn total_weight(&self) -> Weight {
        self.arcs.iter().map(|a| a.weight).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetResult {
    pub d_prime: DiGraph,
    /// `None` when the input was already balanced.
    pub x: Option<Vertex>,
    pub x_outdegree: usize,
    pub midpoints: Vec<Vertex>,
}

pub const DEFAULT_GADGET_WEIGHT: Weight = 1;

/// Adds a vertex x and, for every vertex u with more out- than in-arcs,
/// that many paths x→a→u; symmetrically u→b→x for in-surplus vertices.
/// New vertices are appended after the existing ones, x first.
pub fn build_balanced_extension(d: &DiGraph, gadget_weight: Weight) -> GadgetResult {
    let mut d_prime = d.clone();
    if d.is_balanced() {
        return GadgetResult { d_prime, x: None, x_outdegree: 0, midpoints: Vec::new() };
    }
    let (outd, ind) = (d.out_degrees(), d.in_degrees());
    let x = d_prime.add_vertex();
    let mut midpoints = Vec::new();
    let mut x_outdegree = 0;
    for u in 0..d.vertex_count() {
        for _ in ind[u]..outd[u] {
            let a = d_prime.add_vertex();
            d_prime.add_arc(x, a, gadget_weight).expect("fresh vertices");
            d_prime.add_arc(a, u, gadget_weight).expect("fresh vertices");
            midpoints.push(a);
            x_outdegree += 1;
        }
        for _ in outd[u]..ind[u] {
            let b = d_prime.add_vertex();
            d_prime.add_arc(u, b, gadget_weight).expect("fresh vertices");
            d_prime.add_arc(b, x, gadget_weight).expect("fresh vertices");
            midpoints.push(b);
        }
    }
    debug_assert!(d_prime.is_balanced());
    GadgetResult { d_prime, x: Some(x), x_outdegree, midpoints }
}

pub const DEFAULT_ARC_LIMIT: usize = 16;

/// Maximum number of pairwise arc-disjoint directed cycles, by branching on
/// the lowest remaining arc: either it is unused, or one of the simple
/// cycles through it is taken.
pub fn max_arc_disjoint_cycles(d: &DiGraph, size_limit: usize) -> Result<usize> {
    if d.arc_count() > size_limit || d.arc_count() > 64 {
        return Err(Error::SizeLimit { size: d.arc_count(), limit: size_limit.min(64) });
    }
    let mut s = ArcSearch { d, memo: BTreeMap::new() };
    let all = if d.arc_count() == 64 { u64::MAX } else { (1u64 << d.arc_count()) - 1 };
    Ok(s.best(all))
}

struct ArcSearch<'a> {
    d: &'a DiGraph,
    memo: BTreeMap<u64, usize>,
}

impl ArcSearch<'_> {
    /// Removes arcs that cannot lie on a cycle: those leaving a vertex with
    /// no remaining in-arc or entering one with no remaining out-arc.
    fn prune(&self, mut mask: u64) -> u64 {
        loop {
            let mut outd = vec![0u32; self.d.vertex_count()];
            let mut ind = vec![0u32; self.d.vertex_count()];
            for (i, a) in self.d.arcs().iter().enumerate() {
                if mask >> i & 1 == 1 {
                    outd[a.tail] += 1;
                    ind[a.head] += 1;
                }
            }
            let mut next = mask;
            for (i, a) in self.d.arcs().iter().enumerate() {
                if mask >> i & 1 == 1 && (ind[a.tail] == 0 || outd[a.head] == 0) {
                    next &= !(1 << i);
                }
            }
            if next == mask {
                return mask;
            }
            mask = next;
        }
    }

    fn best(&mut self, mask: u64) -> usize {
        let mask = self.prune(mask);
        if mask == 0 {
            return 0;
        }
        if let Some(&v) = self.memo.get(&mask) {
            return v;
        }
        let first = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << first);
        let mut best = self.best(rest);
        let mut cycles = Vec::new();
        let a = self.d.arcs()[first];
        let mut on_path = vec![false; self.d.vertex_count()];
        on_path[a.tail] = true;
        self.paths(a.head, a.tail, rest, 1 << first, &mut on_path, &mut cycles);
        for c in cycles {
            best = best.max(1 + self.best(mask & !c));
        }
        self.memo.insert(mask, best);
        best
    }

    /// Collects arc sets of simple paths from `x` to `target` within `mask`,
    /// each united with `used`.
    fn paths(&self, x: Vertex, target: Vertex, mask: u64, used: u64, on_path: &mut [bool], out: &mut Vec<u64>) {
        if x == target {
            out.push(used);
            return;
        }
        on_path[x] = true;
        for (i, a) in self.d.arcs().iter().enumerate() {
            if mask >> i & 1 == 1 && a.tail == x && (a.head == target || !on_path[a.head]) {
                self.paths(a.head, target, mask & !(1 << i), used | 1 << i, on_path, out);
            }
        }
        on_path[x] = false;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub r: usize,
    pub r_prime: usize,
    pub x_outdegree: usize,
    pub holds: bool,
}

/// Compares the packing number of `d` with that of its balanced extension:
/// the extension should hold exactly `x_outdegree` more cycles.
pub fn verify_packing_equivalence(d: &DiGraph, size_limit: usize) -> Result<EquivalenceReport> {
    let gadget = build_balanced_extension(d, DEFAULT_GADGET_WEIGHT);
    let r = max_arc_disjoint_cycles(d, size_limit)?;
    let r_prime = max_arc_disjoint_cycles(&gadget.d_prime, size_limit)?;
    Ok(EquivalenceReport { r, r_prime, x_outdegree: gadget.x_outdegree, holds: r_prime == r + gadget.x_outdegree })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize, arcs: &[(usize, usize)]) -> DiGraph {
        let a: Vec<_> = arcs.iter().map(|&(t, h)| (t, h, 1)).collect();
        DiGraph::from_arcs(n, &a).unwrap()
    }

    #[test]
    fn gadget_examples() {
        let g = build_balanced_extension(&unit(2, &[(0, 1)]), 1);
        assert_eq!(g.x, Some(2));
        assert_eq!(g.x_outdegree, 1);
        assert_eq!(g.midpoints, vec![3, 4]);
        assert!(g.d_prime.is_balanced());
        let tails_heads: Vec<_> = g.d_prime.arcs().iter().map(|a| (a.tail, a.head)).collect();
        assert_eq!(tails_heads, vec![(0, 1), (2, 3), (3, 0), (1, 4), (4, 2)]);

        let two = unit(2, &[(0, 1), (1, 0)]);
        let g = build_balanced_extension(&two, 1);
        assert_eq!(g.x, None);
        assert_eq!(g.d_prime, two);

        let path = unit(3, &[(0, 1), (1, 2)]);
        let g = build_balanced_extension(&path, 1);
        assert_eq!(g.x_outdegree, 1);
        assert_eq!(g.d_prime.total_weight(), path.total_weight() + 4);
    }

    #[test]
    fn packing_examples() {
        assert_eq!(max_arc_disjoint_cycles(&unit(2, &[(0, 1), (1, 0)]), 16), Ok(1));
        assert_eq!(max_arc_disjoint_cycles(&unit(4, &[(0, 1), (1, 0), (2, 3), (3, 2)]), 16), Ok(2));
        // a triangle and its reverse contain three 2-cycles
        let both = unit(3, &[(0, 1), (1, 2), (2, 0), (1, 0), (2, 1), (0, 2)]);
        assert_eq!(max_arc_disjoint_cycles(&both, 16), Ok(3));
        assert!(max_arc_disjoint_cycles(&unit(3, &[(0, 1), (1, 2)]), 1).is_err());
    }

    #[test]
    fn equivalence_examples() {
        let r = verify_packing_equivalence(&unit(2, &[(0, 1)]), 16).unwrap();
        assert_eq!((r.r, r.r_prime, r.x_outdegree, r.holds), (0, 1, 1, true));
        let r = verify_packing_equivalence(&unit(3, &[(0, 1), (1, 2)]), 16).unwrap();
        assert_eq!((r.r, r.r_prime, r.x_outdegree, r.holds), (0, 1, 1, true));
        let r = verify_packing_equivalence(&unit(2, &[(0, 1), (1, 0)]), 16).unwrap();
        assert_eq!((r.r, r.r_prime, r.x_outdegree, r.holds), (1, 1, 0, true));
    }
}
