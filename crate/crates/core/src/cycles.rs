//! Shortest cycles, greedy edge-disjoint cycle packing, and an exact
//! branch-and-bound packing search over multigraphs given as
//! [`Multiplicities`].
//!
//! Edge copies are the unit of disjointness: an edge with count 2 holds a
//! 2-cycle on its own, and a packing may use an edge id as many times as it
//! has copies.

use alloc::collections::{BTreeSet, BinaryHeap};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::cpp::Multiplicities;
use crate::error::{Error, Result};
use crate::graph::{Dsu, EdgeId, MultiGraph, Vertex, Walk, Weight};

/// Closed simple cycle as `(vertex, edge)` steps, like a [`Walk`]. No vertex
/// repeats; a 2-cycle uses two parallel edges or two copies of one edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle {
    steps: Vec<(Vertex, EdgeId)>,
}

impl Cycle {
    pub fn new(steps: Vec<(Vertex, EdgeId)>) -> Self {
        Self { steps }
    }

    pub fn steps(&self) -> &[(Vertex, EdgeId)] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.steps.iter().map(|s| s.1)
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.steps.iter().map(|s| s.0)
    }

    pub fn weight(&self, g: &MultiGraph) -> Weight {
        self.edge_ids().map(|id| g.edge(id).map_or(0, |e| e.weight)).sum()
    }

    /// Sorted edge ids, the determinism key.
    pub fn sorted_ids(&self) -> Vec<EdgeId> {
        let mut ids: Vec<_> = self.edge_ids().collect();
        ids.sort_unstable();
        ids
    }

    pub fn to_walk(&self) -> Walk {
        Walk::new(self.steps.clone())
    }

    /// Checks the cycle shape against `g`: at least two steps, consecutive
    /// steps joined by the listed edge, closed, no repeated vertex.
    pub fn is_valid_in(&self, g: &MultiGraph) -> bool {
        let n = self.steps.len();
        if n < 2 {
            return false;
        }
        let mut seen = BTreeSet::new();
        for (i, &(x, id)) in self.steps.iter().enumerate() {
            let Some(e) = g.edge(id) else { return false };
            if !e.touches(x) || e.other(x) != self.steps[(i + 1) % n].0 || !seen.insert(x) {
                return false;
            }
        }
        true
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CyclePacking {
    pub cycles: Vec<Cycle>,
}

impl CyclePacking {
    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Every cycle is valid and no edge is used more often than it has copies.
    pub fn check(&self, m: &Multiplicities<'_>) -> Result<()> {
        let g = m.graph();
        let mut used = vec![0u64; g.edge_count()];
        for c in &self.cycles {
            if !c.is_valid_in(g) {
                return Err(Error::InvalidPacking("malformed cycle"));
            }
            for id in c.edge_ids() {
                used[g.position(id).ok_or(Error::InvalidPacking("unknown edge"))?] += 1;
            }
        }
        if used.iter().zip(m.counts()).any(|(&u, &c)| u > c as u64) {
            return Err(Error::InvalidPacking("edge used more often than it has copies"));
        }
        Ok(())
    }
}

pub(crate) fn subtract(counts: &mut [u32], g: &MultiGraph, c: &Cycle) {
    for id in c.edge_ids() {
        counts[g.position(id).expect("cycle edge in graph")] -= 1;
    }
}

/// Key used for determinism: fewest edges, then lightest, then sorted ids.
fn cycle_key(c: &Cycle, g: &MultiGraph) -> (usize, Weight, Vec<EdgeId>) {
    (c.len(), c.weight(g), c.sorted_ids())
}

/// A cycle with the fewest edges; ties go to the lighter cycle.
pub fn shortest_cycle(m: &Multiplicities<'_>) -> Option<Cycle> {
    let g = m.graph();
    let counts = m.counts();
    let edges = g.edges();

    // Length two: a doubled edge or a parallel pair.
    let mut live: Vec<(Vertex, Vertex, Weight, EdgeId, usize)> = edges
        .iter()
        .enumerate()
        .filter(|(p, _)| counts[*p] > 0)
        .map(|(p, e)| (e.u.min(e.v), e.u.max(e.v), e.weight, e.id, p))
        .collect();
    live.sort_unstable();
    let mut best: Option<(Weight, [EdgeId; 2], Vertex, Vertex)> = None;
    let mut consider = |w: Weight, a: EdgeId, b: EdgeId, x: Vertex, y: Vertex| {
        let ids = if a <= b { [a, b] } else { [b, a] };
        if best.map_or(true, |(bw, bids, _, _)| (w, ids) < (bw, bids)) {
            best = Some((w, ids, x, y));
        }
    };
    for (i, &(x, y, w, id, p)) in live.iter().enumerate() {
        if counts[p] >= 2 {
            consider(2 * w, id, id, x, y);
        }
        // Within a sorted endpoint group the first two entries are the lightest.
        if i + 1 < live.len() && live[i + 1].0 == x && live[i + 1].1 == y && (i == 0 || (live[i - 1].0, live[i - 1].1) != (x, y)) {
            consider(w + live[i + 1].2, id, live[i + 1].3, x, y);
        }
    }
    if let Some((_, [a, b], x, y)) = best {
        return Some(Cycle::new(vec![(x, a), (y, b)]));
    }

    // Simple graph from here on: for every edge ab, the best b→a path avoiding
    // it, ordered by (hops, weight).
    let mut adj: Vec<Vec<(Vertex, usize)>> = vec![Vec::new(); g.vertex_count()];
    for &(x, y, _, _, p) in &live {
        adj[x].push((y, p));
        adj[y].push((x, p));
    }
    let n = g.vertex_count();
    let mut dist = vec![(u32::MAX, Weight::MAX); n];
    let mut pred = vec![usize::MAX; n];
    let mut touched: Vec<Vertex> = Vec::new();
    let mut best: Option<((usize, Weight, Vec<EdgeId>), Cycle)> = None;
    for &(_, _, _, _, p) in &live {
        let e = &edges[p];
        let (a, b) = (e.u, e.v);
        for &x in &touched {
            dist[x] = (u32::MAX, Weight::MAX);
            pred[x] = usize::MAX;
        }
        touched.clear();
        let bound = best.as_ref().map(|(k, _)| (k.0 as u32, k.1));
        let mut heap = BinaryHeap::new();
        dist[b] = (0, 0);
        touched.push(b);
        heap.push(Reverse((0u32, 0 as Weight, b)));
        while let Some(Reverse((h, w, x))) = heap.pop() {
            if (h, w) > dist[x] {
                continue;
            }
            if x == a {
                break;
            }
            for &(y, q) in &adj[x] {
                if q == p {
                    continue;
                }
                let nd = (h + 1, w + edges[q].weight);
                if let Some(bd) = bound {
                    if (nd.0 + 1, nd.1 + e.weight) > bd {
                        continue;
                    }
                }
                if nd < dist[y] {
                    if dist[y].0 == u32::MAX {
                        touched.push(y);
                    }
                    dist[y] = nd;
                    pred[y] = q;
                    heap.push(Reverse((nd.0, nd.1, y)));
                }
            }
        }
        if pred[a] == usize::MAX {
            continue;
        }
        // a -e-> b, then the path from b back to a read off the predecessors.
        let mut back = Vec::new();
        let mut x = a;
        while x != b {
            let q = pred[x];
            let y = edges[q].other(x);
            back.push((y, edges[q].id));
            x = y;
        }
        back.reverse();
        let mut steps = vec![(a, e.id)];
        steps.extend(back);
        let c = Cycle::new(steps);
        let key = cycle_key(&c, g);
        if best.as_ref().map_or(true, |(k, _)| key < *k) {
            best = Some((key, c));
        }
    }
    best.map(|(_, c)| c)
}

/// Repeatedly removes a shortest cycle, stopping after `k` cycles or when
/// the residual multigraph is acyclic.
pub fn greedy_cycle_packing(m: &Multiplicities<'_>, k: usize) -> CyclePacking {
    let g = m.graph();
    let mut residual = m.clone();
    let mut packing = CyclePacking::default();
    while packing.len() < k {
        let Some(c) = shortest_cycle(&residual) else { break };
        subtract(residual.counts_mut(), g, &c);
        packing.cycles.push(c);
    }
    packing
}

pub const DEFAULT_PACKING_LIMIT: usize = 14;

/// Maximum number of pairwise edge-disjoint cycles with a witness, by
/// exhaustive branching. Refuses multigraphs with more than `size_limit`
/// edge copies.
pub fn exact_max_cycle_packing(m: &Multiplicities<'_>, size_limit: usize) -> Result<(usize, CyclePacking)> {
    let copies = m.copies() as usize;
    if copies > size_limit {
        return Err(Error::SizeLimit { size: copies, limit: size_limit });
    }
    max_packing(m, u64::MAX)
}

/// Exact maximum packing with a node budget instead of a size limit.
pub(crate) fn max_packing(m: &Multiplicities<'_>, budget: u64) -> Result<(usize, CyclePacking)> {
    let mut best = greedy_cycle_packing(m, usize::MAX);
    let mut search = PackingSearch::new(m.graph(), budget);
    loop {
        let target = best.len() + 1;
        match search.find(m.counts().to_vec(), target)? {
            Some(cycles) => best = CyclePacking { cycles },
            None => return Ok((best.len(), best)),
        }
    }
}

/// Decides whether `k` edge-disjoint cycles exist. The greedy packing is
/// tried first as a certificate; only if it falls short does the exact
/// search run, bounded by `budget` search nodes.
pub fn packing_at_least(m: &Multiplicities<'_>, k: usize, budget: u64) -> Result<Option<CyclePacking>> {
    if k == 0 {
        return Ok(Some(CyclePacking::default()));
    }
    let greedy = greedy_cycle_packing(m, k);
    if greedy.len() >= k {
        return Ok(Some(greedy));
    }
    let mut search = PackingSearch::new(m.graph(), budget);
    Ok(search.find(m.counts().to_vec(), k)?.map(|cycles| CyclePacking { cycles }))
}

/// Branches on the lowest remaining edge copy: either that copy lies in no
/// packed cycle (drop it) or some packed cycle runs through it (enumerate
/// all simple cycles through it). Failed states are memoized.
struct PackingSearch<'g> {
    g: &'g MultiGraph,
    adj: Vec<Vec<(Vertex, usize)>>,
    failed: BTreeSet<(Vec<u32>, usize)>,
    nodes: u64,
    budget: u64,
}

impl<'g> PackingSearch<'g> {
    fn new(g: &'g MultiGraph, budget: u64) -> Self {
        let mut adj = vec![Vec::new(); g.vertex_count()];
        for (p, e) in g.edges().iter().enumerate() {
            adj[e.u].push((e.v, p));
            adj[e.v].push((e.u, p));
        }
        Self { g, adj, failed: BTreeSet::new(), nodes: 0, budget }
    }

    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded(self.budget));
        }
        Ok(())
    }

    /// Drops copies that cannot lie on any cycle (pendant copies, repeatedly).
    fn prune(&self, counts: &mut [u32]) {
        let edges = self.g.edges();
        let mut deg = vec![0u64; self.g.vertex_count()];
        for (p, e) in edges.iter().enumerate() {
            deg[e.u] += counts[p] as u64;
            deg[e.v] += counts[p] as u64;
        }
        let mut stack: Vec<Vertex> = (0..deg.len()).filter(|&x| deg[x] == 1).collect();
        while let Some(x) = stack.pop() {
            if deg[x] != 1 {
                continue;
            }
            let &(y, p) = self.adj[x].iter().find(|&&(_, p)| counts[p] > 0).expect("degree one");
            counts[p] = 0;
            deg[x] = 0;
            deg[y] -= 1;
            if deg[y] == 1 {
                stack.push(y);
            }
        }
    }

    /// min(copies / 2, cyclomatic number).
    fn upper_bound(&self, counts: &[u32]) -> usize {
        let copies: u64 = counts.iter().map(|&c| c as u64).sum();
        let mut dsu = Dsu::new(self.g.vertex_count());
        let mut touched = vec![false; self.g.vertex_count()];
        let mut merges = 0u64;
        for (p, e) in self.g.edges().iter().enumerate() {
            if counts[p] > 0 {
                touched[e.u] = true;
                touched[e.v] = true;
                if dsu.union(e.u, e.v) {
                    merges += 1;
                }
            }
        }
        // cyclomatic = copies - |V| + components = copies - merges
        let _ = touched;
        (copies / 2).min(copies - merges) as usize
    }

    fn find(&mut self, mut counts: Vec<u32>, need: usize) -> Result<Option<Vec<Cycle>>> {
        if need == 0 {
            return Ok(Some(Vec::new()));
        }
        self.tick()?;
        self.prune(&mut counts);
        if self.upper_bound(&counts) < need {
            return Ok(None);
        }
        let key = (counts, need);
        if self.failed.contains(&key) {
            return Ok(None);
        }
        let (mut counts, need) = key;
        let p = counts.iter().position(|&c| c > 0).expect("positive upper bound implies copies");

        for cycle in self.cycles_through(&counts, p)? {
            let mut rest = counts.clone();
            subtract(&mut rest, self.g, &cycle);
            if let Some(mut more) = self.find(rest, need - 1)? {
                more.insert(0, cycle);
                return Ok(Some(more));
            }
        }
        let snapshot = counts.clone();
        counts[p] -= 1;
        if let Some(found) = self.find(counts, need)? {
            return Ok(Some(found));
        }
        self.failed.insert((snapshot, need));
        Ok(None)
    }

    /// All simple cycles through one copy of the edge at position `p`.
    fn cycles_through(&mut self, counts: &[u32], p: usize) -> Result<Vec<Cycle>> {
        let e = self.g.edges()[p];
        let mut avail = counts.to_vec();
        avail[p] -= 1;
        let mut on_path = vec![false; self.g.vertex_count()];
        let mut path: Vec<(Vertex, EdgeId)> = vec![(e.u, e.id)];
        on_path[e.u] = true;
        on_path[e.v] = true;
        let mut out = Vec::new();
        self.extend(e.v, e.u, &avail, &mut on_path, &mut path, &mut out)?;
        Ok(out)
    }

    fn extend(
        &mut self,
        x: Vertex,
        target: Vertex,
        avail: &[u32],
        on_path: &mut [bool],
        path: &mut Vec<(Vertex, EdgeId)>,
        out: &mut Vec<Cycle>,
    ) -> Result<()> {
        self.tick()?;
        for i in 0..self.adj[x].len() {
            let (y, q) = self.adj[x][i];
            if avail[q] == 0 {
                continue;
            }
            let id = self.g.edges()[q].id;
            if y == target {
                let mut steps = path.clone();
                steps.push((x, id));
                out.push(Cycle::new(steps));
            } else if !on_path[y] {
                on_path[y] = true;
                path.push((x, id));
                self.extend(y, target, avail, on_path, path, out)?;
                path.pop();
                on_path[y] = false;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize, edges: &[(usize, usize)]) -> MultiGraph {
        let e: Vec<_> = edges.iter().map(|&(u, v)| (u, v, 1)).collect();
        MultiGraph::from_edges(n, &e).unwrap()
    }

    fn k4() -> MultiGraph {
        unit(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    }

    fn bowtie() -> MultiGraph {
        unit(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)])
    }

    #[test]
    fn shortest_cycle_examples() {
        let edge = unit(2, &[(0, 1)]);
        let c = shortest_cycle(&Multiplicities::uniform(&edge, 2)).unwrap();
        assert_eq!(c.len(), 2);
        assert!(c.is_valid_in(&edge));

        let g = k4();
        let c = shortest_cycle(&Multiplicities::uniform(&g, 1)).unwrap();
        assert_eq!(c.len(), 3);
        assert!(c.is_valid_in(&g));

        let tree = unit(4, &[(0, 1), (1, 2), (1, 3)]);
        assert!(shortest_cycle(&Multiplicities::uniform(&tree, 1)).is_none());
    }

    #[test]
    fn shortest_cycle_prefers_light_ties() {
        let g = MultiGraph::from_edges(4, &[(0, 1, 5), (1, 2, 5), (2, 0, 5), (1, 3, 1), (3, 2, 1)]).unwrap();
        let c = shortest_cycle(&Multiplicities::uniform(&g, 1)).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.weight(&g), 7);
        let par = MultiGraph::from_edges(2, &[(0, 1, 4), (0, 1, 1), (0, 1, 2)]).unwrap();
        let c = shortest_cycle(&Multiplicities::uniform(&par, 1)).unwrap();
        assert_eq!(c.sorted_ids(), vec![EdgeId(2), EdgeId(3)]);
    }

    #[test]
    fn greedy_examples() {
        let star = unit(4, &[(0, 1), (0, 2), (0, 3)]);
        let m = Multiplicities::uniform(&star, 2);
        let p = greedy_cycle_packing(&m, 3);
        assert_eq!(p.len(), 3);
        p.check(&m).unwrap();
        assert!(p.cycles.iter().all(|c| c.len() == 2));

        let tri = unit(3, &[(0, 1), (1, 2), (2, 0)]);
        assert_eq!(greedy_cycle_packing(&Multiplicities::uniform(&tri, 1), 2).len(), 1);

        let g = bowtie();
        let m = Multiplicities::uniform(&g, 1);
        let p = greedy_cycle_packing(&m, 2);
        assert_eq!(p.len(), 2);
        p.check(&m).unwrap();
        assert!(p.cycles.iter().all(|c| c.len() == 3));
    }

    #[test]
    fn exact_examples() {
        let tri = unit(3, &[(0, 1), (1, 2), (2, 0)]);
        let (nu, w) = exact_max_cycle_packing(&Multiplicities::uniform(&tri, 1), 14).unwrap();
        assert_eq!((nu, w.len()), (1, 1));

        let m = Multiplicities::from_counts(&tri, vec![3, 1, 1]);
        let (nu, w) = exact_max_cycle_packing(&m, 14).unwrap();
        assert_eq!(nu, 2);
        w.check(&m).unwrap();

        let g = k4();
        assert_eq!(exact_max_cycle_packing(&Multiplicities::uniform(&g, 1), 14).unwrap().0, 1);

        let m = Multiplicities::uniform(&g, 3);
        assert_eq!(
            exact_max_cycle_packing(&m, 14),
            Err(Error::SizeLimit { size: 18, limit: 14 })
        );
    }

    #[test]
    fn decision_matches_exact() {
        let g = k4();
        let m = Multiplicities::from_counts(&g, vec![2, 1, 1, 1, 1, 2]);
        let (nu, _) = exact_max_cycle_packing(&m, 14).unwrap();
        assert!(packing_at_least(&m, nu, u64::MAX).unwrap().is_some());
        assert!(packing_at_least(&m, nu + 1, u64::MAX).unwrap().is_none());
    }

    #[test]
    fn removing_a_packing_keeps_degrees_even() {
        let g = bowtie();
        let m = Multiplicities::from_counts(&g, vec![2, 2, 2, 1, 1, 1]);
        let p = greedy_cycle_packing(&m, usize::MAX);
        let mut rest = m.clone();
        for c in &p.cycles {
            subtract(rest.counts_mut(), &g, c);
        }
        assert!(rest.is_even());
    }
}
