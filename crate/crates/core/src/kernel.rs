//! Kernelization for k-CPP: the pendant and packing shortcuts, long-chain
//! reduction, the path multigraph over non-degree-2 vertices, the
//! parallel-path shortcut, and lifting kernel solutions back.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::cpp::{solve_cpp, Multiplicities};
use crate::cycles::{greedy_cycle_packing, Cycle, CyclePacking};
use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeId, MultiGraph, Solution, Vertex, Walk, Weight};
use crate::kcpp::split_into_k_walks;

/// Maximal path whose internal vertices all have degree 2. `edges` run from
/// `start` to `end`; a closed chain has `start == end`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub start: Vertex,
    pub end: Vertex,
    pub edges: Vec<EdgeId>,
    pub internal: Vec<Vertex>,
}

impl Chain {
    pub fn is_closed(&self) -> bool {
        self.start == self.end
    }

    pub fn weight(&self, g: &MultiGraph) -> Weight {
        self.edges.iter().map(|&id| g.edge(id).map_or(0, |e| e.weight)).sum()
    }

    /// Steps traversing the chain starting from `from` (one of its ends).
    pub fn steps_from(&self, from: Vertex, g: &MultiGraph) -> Vec<(Vertex, EdgeId)> {
        let forward = from == self.start;
        debug_assert!(forward || from == self.end);
        let ids: Vec<EdgeId> =
            if forward { self.edges.clone() } else { self.edges.iter().rev().copied().collect() };
        let mut x = from;
        let mut steps = Vec::with_capacity(ids.len());
        for id in ids {
            steps.push((x, id));
            x = g.edge(id).expect("chain edge").other(x);
        }
        steps
    }
}

/// Splits the edges of `g` into chains between anchors (vertices of degree
/// other than 0 and 2) and anchor-free cycle components.
#[derive(Debug, Clone, Default)]
pub struct ChainDecomposition {
    pub chains: Vec<Chain>,
    /// Components in which every vertex has degree 2, as closed chains
    /// starting at their lowest vertex.
    pub bare_cycles: Vec<Chain>,
}

pub fn decompose_chains(g: &MultiGraph) -> ChainDecomposition {
    let deg = g.degrees();
    let mut inc: Vec<Vec<usize>> = vec![Vec::new(); g.vertex_count()];
    for (p, e) in g.edges().iter().enumerate() {
        inc[e.u].push(p);
        inc[e.v].push(p);
    }
    let mut used = vec![false; g.edge_count()];
    let edges = g.edges();
    let mut out = ChainDecomposition::default();

    let follow = |start: Vertex, first: usize, used: &mut Vec<bool>| -> Chain {
        let mut ids = vec![edges[first].id];
        let mut internal = Vec::new();
        used[first] = true;
        let mut prev = first;
        let mut x = edges[first].other(start);
        while deg[x] == 2 && x != start {
            internal.push(x);
            let next = if inc[x][0] == prev { inc[x][1] } else { inc[x][0] };
            used[next] = true;
            ids.push(edges[next].id);
            prev = next;
            x = edges[next].other(x);
        }
        Chain { start, end: x, edges: ids, internal }
    };

    for a in 0..g.vertex_count() {
        if deg[a] == 0 || deg[a] == 2 {
            continue;
        }
        for i in 0..inc[a].len() {
            let p = inc[a][i];
            if !used[p] {
                let c = follow(a, p, &mut used);
                out.chains.push(c);
            }
        }
    }
    for a in 0..g.vertex_count() {
        if let Some(&p) = inc[a].iter().find(|&&p| !used[p]) {
            debug_assert_eq!(deg[a], 2);
            let mut c = follow(a, p, &mut used);
            c.internal.retain(|&x| x != a);
            out.bare_cycles.push(c);
        }
    }
    out
}

/// For each kernel edge, the original edges it stands for, ordered from the
/// kernel edge's `u` endpoint; plus where kernel vertices came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionMap {
    pub vertex_map: Vec<Vertex>,
    pub edges: BTreeMap<EdgeId, Vec<EdgeId>>,
}

impl ExpansionMap {
    pub fn identity(g: &MultiGraph) -> Self {
        Self {
            vertex_map: (0..g.vertex_count()).collect(),
            edges: g.edges().iter().map(|e| (e.id, vec![e.id])).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.vertex_map.iter().enumerate().all(|(i, &v)| i == v)
            && self.edges.iter().all(|(k, v)| v.len() == 1 && v[0] == *k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConstants {
    pub c: f64,
    pub c1: f64,
    pub c2: f64,
}

impl KernelConstants {
    pub fn new(c: f64, c1: f64, c2: f64) -> Result<Self> {
        if !(c > 0.0 && c1 > 0.0 && c2 > 0.0) {
            return Err(Error::InvalidConstants("all constants must be positive"));
        }
        if c2 < Self::min_c2(c1) {
            return Err(Error::InvalidConstants("c2 is below 2·c1 + 4 + 2·log2(c1) + 2"));
        }
        Ok(Self { c, c1, c2 })
    }

    /// Smallest admissible edge constant for a given vertex constant.
    pub fn min_c2(c1: f64) -> f64 {
        2.0 * c1 + 4.0 + 2.0 * libm::log2(c1) + 2.0
    }
}

impl Default for KernelConstants {
    fn default() -> Self {
        Self { c: 8.0, c1: 9.0, c2: Self::min_c2(9.0) }
    }
}

/// Which certificate finished the instance without search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shortcut {
    /// At least k pendant edges, each doubled in any CPP optimum.
    Pendant,
    /// k edge-disjoint cycles found in an optimal CPP multigraph.
    Packing,
    /// 2k parallel degree-2 paths between two vertices.
    ParallelPaths,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedInstance {
    pub graph: MultiGraph,
    pub expansion: ExpansionMap,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KernelOutcome {
    Solved { solution: Solution, via: Shortcut },
    Reduced(ReducedInstance),
}

/// Measured sizes against the configured thresholds. Report-only.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KernelReport {
    pub k: usize,
    pub v1: usize,
    pub v2: usize,
    pub v3plus: usize,
    pub h_vertices: usize,
    pub h_edges: usize,
    pub max_parallel: usize,
    pub max_chain_internal: usize,
    pub bypasses: usize,
    pub blocked_chains: usize,
    /// |V1| must stay below this for the pendant shortcut not to apply.
    pub v1_threshold: f64,
    pub v3plus_threshold: f64,
    pub h_vertex_threshold: f64,
    pub h_edge_threshold: f64,
    /// |V1 ∪ V≥3| exceeds c1·k·log2 k.
    pub exceeds_vertex_bound: bool,
    pub exceeds_edge_bound: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Kernelization {
    pub outcome: KernelOutcome,
    pub report: KernelReport,
}

fn check_instance(g: &MultiGraph, k: usize) -> Result<()> {
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
    Ok(())
}

/// With at least k pendant vertices, their doubled edges give k 2-cycles in
/// any CPP optimum, which is then also k-CPP optimal.
pub fn pendant_shortcut(g: &MultiGraph, k: usize) -> Result<Option<Solution>> {
    check_instance(g, k)?;
    let mut pendant_edges: Vec<(Vertex, EdgeId)> = Vec::new();
    for v in g.degree_classes().v1 {
        let e = g.incident(v).next().expect("pendant edge");
        // both ends of a lone edge are pendant but share one edge
        if !pendant_edges.iter().any(|&(_, id)| id == e.id) {
            pendant_edges.push((v, e.id));
        }
    }
    if pendant_edges.len() < k {
        return Ok(None);
    }
    let cpp = solve_cpp(g)?;
    let cycles = pendant_edges[..k]
        .iter()
        .map(|&(v, id)| Cycle::new(vec![(v, id), (g.edge(id).unwrap().other(v), id)]))
        .collect();
    split_into_k_walks(&cpp.multiplicities, &CyclePacking { cycles }).map(Some)
}

/// Looks for k edge-disjoint cycles in an optimal CPP multigraph: greedily
/// on the multigraph itself, then greedily on the 2-core of `g` with
/// degree-2 chains suppressed.
pub fn packing_shortcut(g: &MultiGraph, k: usize) -> Result<Option<Solution>> {
    check_instance(g, k)?;
    let cpp = solve_cpp(g)?;
    let mut packing = greedy_cycle_packing(&cpp.multiplicities, k);
    if packing.len() < k {
        packing = core_packing(g, k);
    }
    if packing.len() < k {
        return Ok(None);
    }
    split_into_k_walks(&cpp.multiplicities, &packing).map(Some)
}

/// Greedy packing on the suppressed 2-core of `g`, mapped back to `g`.
/// Pendant removal is iterated to a fixed point before suppression.
fn core_packing(g: &MultiGraph, k: usize) -> CyclePacking {
    let mut deg = g.degrees();
    let mut alive = vec![true; g.edge_count()];
    let mut changed = true;
    while changed {
        changed = false;
        for (p, e) in g.edges().iter().enumerate() {
            if alive[p] && (deg[e.u] == 1 || deg[e.v] == 1) {
                alive[p] = false;
                deg[e.u] -= 1;
                deg[e.v] -= 1;
                changed = true;
            }
        }
    }
    let kept: Vec<Edge> = g.edges().iter().zip(&alive).filter(|(_, &a)| a).map(|(e, _)| *e).collect();
    let core = MultiGraph::from_parts(g.vertex_count(), kept, g.next_edge_id().0);
    let dec = decompose_chains(&core);

    let mut cycles: Vec<Cycle> = dec
        .bare_cycles
        .iter()
        .chain(dec.chains.iter().filter(|c| c.is_closed()))
        .map(|c| Cycle::new(c.steps_from(c.start, &core)))
        .collect();
    if cycles.len() < k {
        let open: Vec<&Chain> = dec.chains.iter().filter(|c| !c.is_closed()).collect();
        let mut h = MultiGraph::new(g.vertex_count());
        for c in &open {
            h.add_edge(c.start, c.end, c.edges.len() as Weight).expect("open chain has distinct ends");
        }
        let packed = greedy_cycle_packing(&Multiplicities::uniform(&h, 1), k - cycles.len());
        for hc in packed.cycles {
            let mut steps = Vec::new();
            for (x, hid) in hc.steps().iter().copied() {
                let chain = open[h.position(hid).expect("h edge")];
                steps.extend(chain.steps_from(x, &core));
            }
            cycles.push(Cycle::new(steps));
        }
    }
    cycles.truncate(k);
    CyclePacking { cycles }
}

/// Outcome of [`apply_reduction_rule`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub graph: MultiGraph,
    pub expansion: ExpansionMap,
    pub bypasses: usize,
    /// Chains left longer than k because every bypass would have raised the
    /// minimum edge weight.
    pub blocked_chains: usize,
}

/// Whether replacing weights `a` and `b` by `a + b` keeps the minimum of the
/// multiset unchanged.
fn keeps_minimum(weights: &BTreeMap<Weight, usize>, a: Weight, b: Weight) -> bool {
    let (&min, &count) = weights.iter().next().expect("non-empty");
    let hits = (a == min) as usize + (b == min) as usize;
    count > hits || a + b == min
}

/// Shortens every chain to at most `k` internal vertices by bypassing
/// internal vertices, never changing the minimum edge weight of the graph.
///
/// Positions strictly inside the chain are preferred; the two end positions
/// are used only when every inner position is blocked by the minimum-weight
/// edge and the chain has at least three internal vertices.
pub fn apply_reduction_rule(g: &MultiGraph, k: usize) -> Result<Reduction> {
    check_instance(g, k)?;
    let dec = decompose_chains(g);
    let mut weights: BTreeMap<Weight, usize> = BTreeMap::new();
    for e in g.edges() {
        *weights.entry(e.weight).or_default() += 1;
    }
    let mut next_id = g.next_edge_id().0;
    let mut replaced = vec![false; g.edge_count()];
    let mut new_edges: Vec<Edge> = Vec::new();
    let mut expansion: BTreeMap<EdgeId, Vec<EdgeId>> = BTreeMap::new();
    let mut bypasses = 0;
    let mut blocked_chains = 0;

    struct Segment {
        id: EdgeId,
        weight: Weight,
        orig: Vec<EdgeId>,
    }

    for chain in dec.chains.iter().chain(&dec.bare_cycles) {
        if chain.internal.len() <= k {
            continue;
        }
        let mut verts: Vec<Vertex> = Vec::with_capacity(chain.internal.len() + 2);
        verts.push(chain.start);
        verts.extend(&chain.internal);
        verts.push(chain.end);
        let mut segs: Vec<Segment> = chain
            .edges
            .iter()
            .map(|&id| Segment { id, weight: g.edge(id).unwrap().weight, orig: vec![id] })
            .collect();
        let mut merged_any = false;
        while verts.len() - 2 > k {
            let r = verts.len() - 2;
            // internal vertex i (1-based) joins segments i-1 and i
            let ends: &[usize] = if r >= 3 { &[1, r] } else { &[] };
            let pick = (2..r)
                .chain(ends.iter().copied())
                .find(|&i| keeps_minimum(&weights, segs[i - 1].weight, segs[i].weight));
            let Some(i) = pick else {
                blocked_chains += 1;
                break;
            };
            let b = segs.remove(i);
            let a = &mut segs[i - 1];
            for w in [a.weight, b.weight] {
                let slot = weights.get_mut(&w).unwrap();
                *slot -= 1;
                if *slot == 0 {
                    weights.remove(&w);
                }
            }
            a.weight += b.weight;
            *weights.entry(a.weight).or_default() += 1;
            a.orig.extend(b.orig);
            a.id = EdgeId(next_id);
            next_id += 1;
            verts.remove(i);
            bypasses += 1;
            merged_any = true;
        }
        if !merged_any {
            continue;
        }
        for &id in &chain.edges {
            replaced[g.position(id).unwrap()] = true;
        }
        for (j, s) in segs.into_iter().enumerate() {
            if s.orig.len() == 1 {
                // untouched original edge keeps its own orientation
                replaced[g.position(s.id).unwrap()] = false;
                continue;
            }
            new_edges.push(Edge { id: s.id, u: verts[j], v: verts[j + 1], weight: s.weight });
            expansion.insert(s.id, s.orig);
        }
    }

    let mut edges: Vec<Edge> =
        g.edges().iter().zip(&replaced).filter(|(_, &r)| !r).map(|(e, _)| *e).collect();
    for e in &edges {
        expansion.insert(e.id, vec![e.id]);
    }
    edges.extend(new_edges);
    edges.sort_unstable_by_key(|e| e.id);
    let graph = MultiGraph::from_parts(g.vertex_count(), edges, next_id);
    debug_assert_eq!(graph.min_weight_edge().map(|e| e.weight), g.min_weight_edge().map(|e| e.weight));
    debug_assert_eq!(graph.total_weight(), g.total_weight());
    Ok(Reduction {
        graph,
        expansion: ExpansionMap { vertex_map: (0..g.vertex_count()).collect(), edges: expansion },
        bypasses,
        blocked_chains,
    })
}

/// Multigraph on the vertices of degree other than 2 with one edge per
/// chain between two distinct such vertices.
#[derive(Debug, Clone)]
pub struct PathMultigraph {
    /// Shares vertex indices with the source graph; degree-2 vertices are
    /// isolated here.
    pub h: MultiGraph,
    pub vertices: Vec<Vertex>,
    /// `chains[i]` is the chain behind `h.edges()[i]`.
    pub chains: Vec<Chain>,
    /// Chains that start and end at the same vertex; they would be loops.
    pub loops: Vec<Chain>,
}

pub fn build_path_multigraph(g: &MultiGraph) -> Result<PathMultigraph> {
    let classes = g.degree_classes();
    if classes.v1.is_empty() && classes.v3plus.is_empty() {
        return Err(if g.edge_count() == 0 { Error::NoEdges } else { Error::BareCycle });
    }
    let dec = decompose_chains(g);
    if !dec.bare_cycles.is_empty() {
        return Err(Error::BareCycle);
    }
    let mut vertices = classes.v1;
    vertices.extend(classes.v3plus);
    vertices.sort_unstable();
    let mut h = MultiGraph::new(g.vertex_count());
    let mut chains = Vec::new();
    let mut loops = Vec::new();
    for c in dec.chains {
        if c.is_closed() {
            loops.push(c);
        } else {
            h.add_edge(c.start, c.end, c.weight(g))?;
            chains.push(c);
        }
    }
    Ok(PathMultigraph { h, vertices, chains, loops })
}

/// Parallel-edge classes of `h`, keyed by sorted endpoints, values are
/// positions into `h.edges()`.
fn parallel_classes(h: &MultiGraph) -> BTreeMap<(Vertex, Vertex), Vec<usize>> {
    let mut classes: BTreeMap<(Vertex, Vertex), Vec<usize>> = BTreeMap::new();
    for (p, e) in h.edges().iter().enumerate() {
        classes.entry((e.u.min(e.v), e.u.max(e.v))).or_default().push(p);
    }
    classes
}

/// If two vertices of H are joined by at least 2k chains, pairs them up
/// into k edge-disjoint cycles of `g`.
pub fn parallel_edge_shortcut(g: &MultiGraph, h: &PathMultigraph, k: usize) -> Option<CyclePacking> {
    if k == 0 {
        return Some(CyclePacking::default());
    }
    let classes = parallel_classes(&h.h);
    let (&(a, _), class) = classes.iter().find(|(_, c)| c.len() >= 2 * k)?;
    let cycles = class[..2 * k]
        .chunks(2)
        .map(|pair| {
            let (first, second) = (&h.chains[pair[0]], &h.chains[pair[1]]);
            let mut steps = first.steps_from(a, g);
            let b = if first.start == a { first.end } else { first.start };
            steps.extend(second.steps_from(b, g));
            Cycle::new(steps)
        })
        .collect();
    Some(CyclePacking { cycles })
}

/// Drops isolated vertices and renumbers edges 1.. in id order.
fn compact(g: &MultiGraph, expansion: &ExpansionMap) -> (MultiGraph, ExpansionMap) {
    let deg = g.degrees();
    let mut new_index = vec![usize::MAX; g.vertex_count()];
    let mut vertex_map = Vec::new();
    for v in 0..g.vertex_count() {
        if deg[v] > 0 {
            new_index[v] = vertex_map.len();
            vertex_map.push(expansion.vertex_map[v]);
        }
    }
    let mut kernel = MultiGraph::new(vertex_map.len());
    let mut edges = BTreeMap::new();
    for e in g.edges() {
        let id = kernel.add_edge(new_index[e.u], new_index[e.v], e.weight).expect("compacted edge");
        edges.insert(id, expansion.edges[&e.id].clone());
    }
    (kernel, ExpansionMap { vertex_map, edges })
}

/// Rewrites a kernel solution walk-by-walk onto the original graph.
pub fn lift_solution(
    original: &MultiGraph,
    kernel: &MultiGraph,
    expansion: &ExpansionMap,
    s: &Solution,
) -> Result<Solution> {
    if expansion.vertex_map.len() != kernel.vertex_count() {
        return Err(Error::ExpansionMismatch("vertex map size differs from kernel"));
    }
    let mut walks = Vec::with_capacity(s.walks.len());
    let mut total: Weight = 0;
    for walk in &s.walks {
        let mut steps = Vec::new();
        for &(kv, kid) in walk.steps() {
            let ke = kernel.edge(kid).ok_or(Error::ExpansionMismatch("walk uses unknown kernel edge"))?;
            let path = expansion.edges.get(&kid).ok_or(Error::ExpansionMismatch("kernel edge not expanded"))?;
            let mut x = *expansion
                .vertex_map
                .get(kv)
                .ok_or(Error::ExpansionMismatch("walk vertex outside kernel"))?;
            let forward = ke.u == kv;
            let ordered: Vec<EdgeId> = if forward { path.clone() } else { path.iter().rev().copied().collect() };
            for id in ordered {
                let e = original.edge(id).ok_or(Error::ExpansionMismatch("unknown original edge"))?;
                if !e.touches(x) {
                    return Err(Error::ExpansionMismatch("expanded path is not contiguous"));
                }
                steps.push((x, id));
                total += e.weight;
                x = e.other(x);
            }
            let end = expansion.vertex_map[ke.other(kv)];
            if x != end {
                return Err(Error::ExpansionMismatch("expanded path ends elsewhere"));
            }
        }
        walks.push(Walk::new(steps));
    }
    Ok(Solution { walks, total_weight: total })
}

fn log2k(k: usize) -> f64 {
    libm::log2(k as f64)
}

fn measure(g: &MultiGraph, k: usize, consts: &KernelConstants, report: &mut KernelReport) {
    let classes = g.degree_classes();
    let kf = k as f64;
    report.k = k;
    report.v1 = classes.v1.len();
    report.v2 = classes.v2.len();
    report.v3plus = classes.v3plus.len();
    report.v1_threshold = kf;
    report.v3plus_threshold = consts.c * kf * log2k(k) + kf;
    report.h_vertex_threshold = consts.c1 * kf * log2k(k);
    report.h_edge_threshold = consts.c2 * kf * log2k(k);
    let dec = decompose_chains(g);
    report.max_chain_internal =
        dec.chains.iter().chain(&dec.bare_cycles).map(|c| c.internal.len()).max().unwrap_or(0);
    if let Ok(h) = build_path_multigraph(g) {
        report.h_vertices = h.vertices.len();
        report.h_edges = h.h.edge_count();
        report.max_parallel = parallel_classes(&h.h).values().map(Vec::len).max().unwrap_or(0);
    }
    report.exceeds_vertex_bound = (report.v1 + report.v3plus) as f64 > report.h_vertex_threshold;
    report.exceeds_edge_bound = report.h_edges as f64 > report.h_edge_threshold;
}

/// Runs the kernel pipeline: pendant shortcut, packing shortcut, chain
/// reduction, then the packing and parallel-path
/// shortcuts again on the reduced graph. Anything left is returned as a
/// compacted kernel with `k` unchanged.
pub fn kernelize(g: &MultiGraph, k: usize, consts: &KernelConstants) -> Result<Kernelization> {
    check_instance(g, k)?;
    let mut report = KernelReport::default();
    measure(g, k, consts, &mut report);
    let solved = |solution, via, report| Ok(Kernelization { outcome: KernelOutcome::Solved { solution, via }, report });

    if let Some(s) = pendant_shortcut(g, k)? {
        return solved(s, Shortcut::Pendant, report);
    }
    if let Some(s) = packing_shortcut(g, k)? {
        return solved(s, Shortcut::Packing, report);
    }
    let red = apply_reduction_rule(g, k)?;
    measure(&red.graph, k, consts, &mut report);
    report.bypasses = red.bypasses;
    report.blocked_chains = red.blocked_chains;
    if red.bypasses > 0 {
        if let Some(s) = packing_shortcut(&red.graph, k)? {
            let lifted = lift_solution(g, &red.graph, &red.expansion, &s)?;
            return solved(lifted, Shortcut::Packing, report);
        }
    }
    let h = match build_path_multigraph(&red.graph) {
        Ok(h) => Some(h),
        Err(Error::BareCycle) => None,
        Err(e) => return Err(e),
    };
    if let Some(packing) = h.as_ref().and_then(|h| parallel_edge_shortcut(&red.graph, h, k)) {
        let cpp = solve_cpp(&red.graph)?;
        let s = split_into_k_walks(&cpp.multiplicities, &packing)?;
        let lifted = lift_solution(g, &red.graph, &red.expansion, &s)?;
        return solved(lifted, Shortcut::ParallelPaths, report);
    }
    let (graph, expansion) = compact(&red.graph, &red.expansion);
    Ok(Kernelization { outcome: KernelOutcome::Reduced(ReducedInstance { graph, expansion, k }), report })
}
