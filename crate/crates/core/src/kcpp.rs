//! k-CPP solving: splitting an Eulerian multigraph into k closed walks, the
//! restricted exact search used on kernels, the full pipeline, and an
//! unrestricted brute-force oracle for small graphs.

use alloc::vec;
use alloc::vec::Vec;

use crate::cpp::{euler_tour, solve_cpp, Multiplicities};
use crate::cycles::{packing_at_least, subtract, CyclePacking};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, MultiGraph, Solution, Vertex, Walk, Weight};
use crate::kernel::{kernelize, lift_solution, KernelConstants, KernelOutcome, KernelReport, Shortcut};

/// Turns `packing` (k edge-disjoint cycles of `m`) into exactly k closed
/// walks covering every edge copy of `m` once. Each component left after
/// removing the packing is toured and spliced into the first cycle that
/// shares a vertex with it.
pub fn split_into_k_walks(m: &Multiplicities<'_>, packing: &CyclePacking) -> Result<Solution> {
    let g = m.graph();
    packing.check(m)?;
    if let Some(x) = m.degrees().iter().position(|d| d % 2 == 1) {
        return Err(Error::OddDegree(x));
    }
    let mut residual = m.counts().to_vec();
    for c in &packing.cycles {
        subtract(&mut residual, g, c);
    }
    let mut walks: Vec<Vec<(Vertex, EdgeId)>> = packing.cycles.iter().map(|c| c.steps().to_vec()).collect();

    loop {
        let Some(p) = residual.iter().position(|&c| c > 0) else { break };
        let seed = g.edges()[p].u;
        let component = residual_component(g, &residual, seed);
        let (wi, si) = walks
            .iter()
            .enumerate()
            .find_map(|(wi, w)| w.iter().position(|&(x, _)| component[x]).map(|si| (wi, si)))
            .ok_or(Error::Internal("leftover component shares no vertex with the packing"))?;
        let at = walks[wi][si].0;
        let mut part = residual.clone();
        for (q, e) in g.edges().iter().enumerate() {
            if !component[e.u] {
                part[q] = 0;
            }
        }
        let tour = euler_tour(&Multiplicities::from_counts(g, part), at)?;
        for &(_, id) in tour.steps() {
            residual[g.position(id).unwrap()] -= 1;
        }
        walks[wi].splice(si..si, tour.into_steps());
    }

    let walks: Vec<Walk> = walks.into_iter().map(Walk::new).collect();
    Ok(Solution { walks, total_weight: m.weight() })
}

fn residual_component(g: &MultiGraph, counts: &[u32], seed: Vertex) -> Vec<bool> {
    let mut adj = vec![Vec::new(); g.vertex_count()];
    for (p, e) in g.edges().iter().enumerate() {
        if counts[p] > 0 {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
    }
    let mut seen = vec![false; g.vertex_count()];
    seen[seed] = true;
    let mut stack = vec![seed];
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen
}

/// Candidate multiplicities of the restricted search: every edge once, the
/// edges of `double_set` once more, and `extra_pairs` further pairs of
/// copies on `e_min`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictedDuplication {
    pub double_set: Vec<EdgeId>,
    pub extra_pairs: usize,
    pub e_min: EdgeId,
}

impl RestrictedDuplication {
    pub fn counts(&self, g: &MultiGraph) -> Vec<u32> {
        let mut counts = vec![1u32; g.edge_count()];
        for id in &self.double_set {
            counts[g.position(*id).expect("edge of g")] += 1;
        }
        counts[g.position(self.e_min).expect("edge of g")] += 2 * self.extra_pairs as u32;
        counts
    }
}

pub const DEFAULT_SEARCH_BUDGET: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactSolution {
    pub solution: Solution,
    pub duplication: RestrictedDuplication,
    /// CPP optimum of the instance, a lower bound for every k.
    pub cpp_weight: Weight,
    pub candidates: u64,
}

impl ExactSolution {
    pub fn met_lower_bound(&self) -> bool {
        self.solution.total_weight == self.cpp_weight
    }
}

/// All edge sets whose odd vertices are exactly the odd vertices of `g` and
/// whose weight is at most `bound`, sorted by weight then edge ids.
/// Each cotree subset determines exactly one such set.
fn joins_up_to(g: &MultiGraph, bound: Weight, budget: &mut u64) -> Result<Vec<(Weight, Vec<EdgeId>)>> {
    let n = g.vertex_count();
    let edges = g.edges();
    let mut adj = vec![Vec::new(); n];
    for (p, e) in edges.iter().enumerate() {
        adj[e.u].push(p);
        adj[e.v].push(p);
    }
    let root = edges[0].u;
    let mut parent_edge = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut order = vec![root];
    seen[root] = true;
    let mut in_tree = vec![false; edges.len()];
    let mut i = 0;
    while i < order.len() {
        let x = order[i];
        i += 1;
        for &p in &adj[x] {
            let y = edges[p].other(x);
            if !seen[y] {
                seen[y] = true;
                parent_edge[y] = p;
                in_tree[p] = true;
                order.push(y);
            }
        }
    }
    let cotree: Vec<usize> = (0..edges.len()).filter(|&p| !in_tree[p]).collect();
    let base_parity: Vec<bool> = g.degrees().iter().map(|d| d % 2 == 1).collect();

    struct Ctx<'a> {
        g: &'a MultiGraph,
        order: &'a [Vertex],
        parent_edge: &'a [usize],
        cotree: &'a [usize],
        bound: Weight,
        limit: u64,
        out: Vec<(Weight, Vec<EdgeId>)>,
    }

    fn leaf(ctx: &mut Ctx<'_>, chosen: &[usize], mut parity: Vec<bool>, weight: Weight) {
        let edges = ctx.g.edges();
        let mut w = weight;
        let mut set: Vec<usize> = chosen.to_vec();
        for &x in ctx.order.iter().skip(1).rev() {
            if parity[x] {
                let p = ctx.parent_edge[x];
                set.push(p);
                w += edges[p].weight;
                if w > ctx.bound {
                    return;
                }
                parity[x] = false;
                let y = edges[p].other(x);
                parity[y] = !parity[y];
            }
        }
        debug_assert!(!parity[ctx.order[0]]);
        let mut ids: Vec<EdgeId> = set.iter().map(|&p| edges[p].id).collect();
        ids.sort_unstable();
        ctx.out.push((w, ids));
    }

    fn rec(
        ctx: &mut Ctx<'_>,
        i: usize,
        chosen: &mut Vec<usize>,
        parity: &mut Vec<bool>,
        weight: Weight,
        budget: &mut u64,
    ) -> Result<()> {
        if *budget == 0 {
            return Err(Error::BudgetExceeded(ctx.limit));
        }
        *budget -= 1;
        if i == ctx.cotree.len() {
            leaf(ctx, chosen, parity.clone(), weight);
            return Ok(());
        }
        rec(ctx, i + 1, chosen, parity, weight, budget)?;
        let p = ctx.cotree[i];
        let e = ctx.g.edges()[p];
        if weight + e.weight <= ctx.bound {
            chosen.push(p);
            parity[e.u] = !parity[e.u];
            parity[e.v] = !parity[e.v];
            rec(ctx, i + 1, chosen, parity, weight + e.weight, budget)?;
            parity[e.u] = !parity[e.u];
            parity[e.v] = !parity[e.v];
            chosen.pop();
        }
        Ok(())
    }

    let mut ctx = Ctx { g, order: &order, parent_edge: &parent_edge, cotree: &cotree, bound, limit: *budget, out: Vec::new() };
    rec(&mut ctx, 0, &mut Vec::new(), &mut base_parity.clone(), 0, budget)?;
    let mut out = ctx.out;
    out.sort_unstable();
    Ok(out)
}

/// Exact k-CPP by searching only multiplicity vectors in which no edge but
/// one fixed minimum-weight edge is used more than twice. The cheapest
/// feasible candidate wins; ties go to fewer extra pairs, then to the
/// smaller doubled set.
pub fn solve_kcpp_exact(g: &MultiGraph, k: usize, budget: u64) -> Result<ExactSolution> {
    if k == 0 {
        return Err(Error::ZeroK);
    }
    if g.edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if !g.weights_fit(k) {
        return Err(Error::WeightOverflow);
    }
    let cpp = solve_cpp(g)?;
    let base = g.total_weight();
    let e_min = *g.min_weight_edge().expect("non-empty");
    let pair_cost = 2 * e_min.weight;
    let bound = cpp.join.weight + k as Weight * pair_cost;
    let mut left = budget;
    let joins = joins_up_to(g, bound, &mut left)?;

    let mut candidates = 0u64;
    let mut best: Option<(Weight, usize, usize, CyclePacking)> = None;
    'joins: for (si, (sw, set)) in joins.iter().enumerate() {
        if let Some((cost, ..)) = &best {
            if base + sw > *cost {
                break;
            }
        }
        for t in 0..=k {
            let cost = base + sw + t as Weight * pair_cost;
            if let Some((bc, bt, ..)) = &best {
                if (cost, t) >= (*bc, *bt) {
                    continue 'joins;
                }
            }
            candidates += 1;
            let dup = RestrictedDuplication { double_set: set.clone(), extra_pairs: t, e_min: e_min.id };
            let m = Multiplicities::from_counts(g, dup.counts(g));
            if let Some(mut p) = packing_at_least(&m, k, left)? {
                p.cycles.truncate(k);
                best = Some((cost, t, si, p));
                if cost == cpp.weight && t == 0 {
                    break 'joins;
                }
                continue 'joins;
            }
        }
    }
    let (_, t, si, packing) = best.ok_or(Error::Internal("no feasible restricted candidate"))?;
    let duplication = RestrictedDuplication { double_set: joins[si].1.clone(), extra_pairs: t, e_min: e_min.id };
    let m = Multiplicities::from_counts(g, duplication.counts(g));
    let solution = split_into_k_walks(&m, &packing)?;
    Ok(ExactSolution { solution, duplication, cpp_weight: cpp.weight, candidates })
}

/// How [`solve_kcpp`] reached its answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Shortcut(Shortcut),
    KernelSearch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KcppOutcome {
    pub solution: Solution,
    pub cpp_weight: Weight,
    pub route: Route,
    pub report: KernelReport,
    /// `Some(weight <= p)` when a budget was given.
    pub verdict: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub constants: KernelConstants,
    pub budget: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { constants: KernelConstants::default(), budget: DEFAULT_SEARCH_BUDGET }
    }
}

/// Kernelizes, then solves the kernel exactly and lifts the result.
pub fn solve_kcpp(g: &MultiGraph, k: usize, p: Option<Weight>, opts: &SolveOptions) -> Result<KcppOutcome> {
    let kz = kernelize(g, k, &opts.constants)?;
    let cpp_weight = solve_cpp(g)?.weight;
    let (solution, route) = match kz.outcome {
        KernelOutcome::Solved { solution, via } => (solution, Route::Shortcut(via)),
        KernelOutcome::Reduced(r) => {
            let exact = solve_kcpp_exact(&r.graph, r.k, opts.budget)?;
            (lift_solution(g, &r.graph, &r.expansion, &exact.solution)?, Route::KernelSearch)
        }
    };
    let verdict = p.map(|p| solution.total_weight <= p);
    Ok(KcppOutcome { solution, cpp_weight, route, report: kz.report, verdict })
}

/// Size gate of the brute-force oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleGate {
    pub max_edges: usize,
    pub max_k: usize,
}

impl Default for OracleGate {
    fn default() -> Self {
        Self { max_edges: 8, max_k: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub weight: Weight,
    pub counts: Vec<u32>,
    pub packing: CyclePacking,
}

/// Brute force over every multiplicity vector with counts in
/// `1..=mult_cap` (default 2k+2). A vector is feasible when all degrees are
/// even and it holds k edge-disjoint cycles.
pub fn oracle_kcpp(g: &MultiGraph, k: usize, mult_cap: Option<u32>, gate: OracleGate) -> Result<OracleResult> {
    if k == 0 {
        return Err(Error::ZeroK);
    }
    if g.edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    if g.edge_count() > gate.max_edges {
        return Err(Error::SizeLimit { size: g.edge_count(), limit: gate.max_edges });
    }
    if k > gate.max_k {
        return Err(Error::SizeLimit { size: k, limit: gate.max_k });
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let cap = mult_cap.unwrap_or(2 * k as u32 + 2).max(1);
    let edges = g.edges();
    let mut last = vec![usize::MAX; g.vertex_count()];
    for (p, e) in edges.iter().enumerate() {
        last[e.u] = p;
        last[e.v] = p;
    }
    let mut rest = vec![0 as Weight; edges.len() + 1];
    for p in (0..edges.len()).rev() {
        rest[p] = rest[p + 1] + edges[p].weight;
    }

    struct Search<'a> {
        g: &'a MultiGraph,
        k: usize,
        cap: u32,
        last: Vec<usize>,
        rest: Vec<Weight>,
        counts: Vec<u32>,
        deg: Vec<u32>,
        best: Option<OracleResult>,
    }

    impl Search<'_> {
        fn rec(&mut self, p: usize, weight: Weight) -> Result<()> {
            if let Some(b) = &self.best {
                if weight + self.rest[p] >= b.weight {
                    return Ok(());
                }
            }
            let edges = self.g.edges();
            if p == edges.len() {
                let m = Multiplicities::from_counts(self.g, self.counts.clone());
                if let Some(mut packing) = packing_at_least(&m, self.k, u64::MAX)? {
                    packing.cycles.truncate(self.k);
                    self.best = Some(OracleResult { weight, counts: self.counts.clone(), packing });
                }
                return Ok(());
            }
            let e = edges[p];
            for c in 1..=self.cap {
                self.counts[p] = c;
                self.deg[e.u] += c;
                self.deg[e.v] += c;
                let closed_ok = [e.u, e.v].iter().all(|&x| self.last[x] != p || self.deg[x] % 2 == 0);
                if closed_ok {
                    self.rec(p + 1, weight + c as Weight * e.weight)?;
                }
                self.deg[e.u] -= c;
                self.deg[e.v] -= c;
            }
            self.counts[p] = 0;
            Ok(())
        }
    }

    let mut s = Search {
        g,
        k,
        cap,
        last,
        rest,
        counts: vec![0; edges.len()],
        deg: vec![0; g.vertex_count()],
        best: None,
    };
    s.rec(0, 0)?;
    s.best.ok_or(Error::Internal("no feasible multiplicity vector under the cap"))
}

/// Splits an oracle witness into walks.
pub fn oracle_solution(g: &MultiGraph, r: &OracleResult) -> Result<Solution> {
    split_into_k_walks(&Multiplicities::from_counts(g, r.counts.clone()), &r.packing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::Cycle;
    use crate::graph::verify_solution;

    fn two_cycle(g: &MultiGraph, id: EdgeId) -> Cycle {
        let e = g.edge(id).expect("edge");
        Cycle::new(vec![(e.u, id), (e.v, id)])
    }

    fn unit(n: usize, edges: &[(usize, usize)]) -> MultiGraph {
        let e: Vec<_> = edges.iter().map(|&(u, v)| (u, v, 1)).collect();
        MultiGraph::from_edges(n, &e).unwrap()
    }

    fn triangle() -> MultiGraph {
        unit(3, &[(0, 1), (1, 2), (2, 0)])
    }

    fn bowtie() -> MultiGraph {
        unit(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)])
    }

    #[test]
    fn split_examples() {
        let tri = triangle();
        let m = Multiplicities::uniform(&tri, 2);
        let cycles = tri.edges().iter().map(|e| two_cycle(&tri, e.id)).collect();
        let s = split_into_k_walks(&m, &CyclePacking { cycles }).unwrap();
        assert_eq!(verify_solution(&tri, 3, &s), Ok(6));

        let star = unit(4, &[(0, 1), (0, 2), (0, 3)]);
        let m = Multiplicities::uniform(&star, 2);
        let cycles = vec![two_cycle(&star, EdgeId(1)), two_cycle(&star, EdgeId(2))];
        let s = split_into_k_walks(&m, &CyclePacking { cycles }).unwrap();
        assert_eq!(verify_solution(&star, 2, &s), Ok(6));
        let mut lens: Vec<usize> = s.walks.iter().map(Walk::len).collect();
        lens.sort();
        assert_eq!(lens, vec![2, 4]);
    }

    #[test]
    fn split_rejects_foreign_packing() {
        let tri = triangle();
        let m = Multiplicities::uniform(&tri, 1);
        let cycles = vec![two_cycle(&tri, EdgeId(1))];
        assert!(split_into_k_walks(&m, &CyclePacking { cycles }).is_err());
    }

    #[test]
    fn exact_examples() {
        let b = DEFAULT_SEARCH_BUDGET;
        let tri = triangle();
        let s = solve_kcpp_exact(&tri, 2, b).unwrap();
        assert_eq!(verify_solution(&tri, 2, &s.solution), Ok(5));
        assert_eq!(s.duplication.extra_pairs, 1);
        assert!(s.duplication.double_set.is_empty());
        assert_eq!(solve_kcpp_exact(&tri, 1, b).unwrap().solution.total_weight, 3);
        assert_eq!(solve_kcpp_exact(&tri, 3, b).unwrap().solution.total_weight, 6);

        let edge = unit(2, &[(0, 1)]);
        let s = solve_kcpp_exact(&edge, 2, b).unwrap();
        assert_eq!(verify_solution(&edge, 2, &s.solution), Ok(4));
    }

    #[test]
    fn oracle_examples() {
        let gate = OracleGate::default();
        assert_eq!(oracle_kcpp(&triangle(), 2, None, gate).unwrap().weight, 5);
        assert_eq!(oracle_kcpp(&unit(2, &[(0, 1)]), 1, None, gate).unwrap().weight, 2);
        assert_eq!(oracle_kcpp(&unit(3, &[(0, 1), (1, 2)]), 1, None, gate).unwrap().weight, 4);
        assert_eq!(oracle_kcpp(&bowtie(), 2, None, gate).unwrap().weight, 6);
        let r = oracle_kcpp(&triangle(), 3, None, gate).unwrap();
        let s = oracle_solution(&triangle(), &r).unwrap();
        assert_eq!(verify_solution(&triangle(), 3, &s), Ok(6));
        assert!(matches!(oracle_kcpp(&triangle(), 4, None, gate), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn pipeline_examples() {
        let o = SolveOptions::default();
        let r = solve_kcpp(&bowtie(), 2, Some(6), &o).unwrap();
        assert_eq!(r.verdict, Some(true));
        assert_eq!(verify_solution(&bowtie(), 2, &r.solution), Ok(6));
        let r = solve_kcpp(&triangle(), 2, Some(4), &o).unwrap();
        assert_eq!(r.verdict, Some(false));
        assert_eq!(r.solution.total_weight, 5);
        assert_eq!(r.route, Route::KernelSearch);
    }
}
