//! Seeded instance generators. The same seed always yields the same file.

use kcpp_core::{DiGraph, MultiGraph, Weight};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small fixed graphs usable as a base for inflation.
pub fn named(name: &str) -> Option<MultiGraph> {
    let edges: &[(usize, usize)] = match name {
        "triangle" => &[(0, 1), (1, 2), (2, 0)],
        "bowtie" => &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)],
        "k4" => &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        "star" => &[(0, 1), (0, 2), (0, 3)],
        "path" => &[(0, 1), (1, 2)],
        "edge" => &[(0, 1)],
        _ => return None,
    };
    let n = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    let e: Vec<_> = edges.iter().map(|&(u, v)| (u, v, 1)).collect();
    MultiGraph::from_edges(n, &e).ok()
}

/// Replaces edge `i` of `base` by a path of `lengths[i]` edges (at least 1),
/// each carrying the weight of the original edge. New vertices follow the
/// base vertices.
pub fn inflate(base: &MultiGraph, lengths: &[usize]) -> MultiGraph {
    assert_eq!(lengths.len(), base.edge_count());
    let extra: usize = lengths.iter().map(|&l| l.max(1) - 1).sum();
    let mut g = MultiGraph::new(base.vertex_count() + extra);
    let mut next = base.vertex_count();
    for (e, &len) in base.edges().iter().zip(lengths) {
        let mut prev = e.u;
        for _ in 1..len.max(1) {
            g.add_edge(prev, next, e.weight).expect("fresh vertex");
            prev = next;
            next += 1;
        }
        g.add_edge(prev, e.v, e.weight).expect("distinct ends");
    }
    g
}

/// Every edge of `base` becomes a chain of `chain` edges.
pub fn chain_inflated(base: &MultiGraph, chain: usize) -> MultiGraph {
    inflate(base, &vec![chain; base.edge_count()])
}

/// Random spanning tree plus `m - (n - 1)` extra edges; parallel edges are
/// allowed, loops are not. Weights are uniform in `0..=max_weight`.
pub fn random_connected(rng: &mut impl Rng, n: usize, m: usize, max_weight: Weight) -> MultiGraph {
    assert!(n >= 2 && m + 1 >= n, "need n >= 2 and m >= n - 1");
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut g = MultiGraph::new(n);
    for i in 1..n {
        let parent = order[rng.gen_range(0..i)];
        g.add_edge(parent, order[i], rng.gen_range(0..=max_weight)).unwrap();
    }
    while g.edge_count() < m {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v {
            g.add_edge(u, v, rng.gen_range(0..=max_weight)).unwrap();
        }
    }
    g
}

/// Two vertices joined by `paths` internally disjoint paths of `len` edges.
pub fn theta(paths: usize, len: usize, weight: Weight) -> MultiGraph {
    let base = MultiGraph::from_edges(2, &vec![(0, 1, weight); paths]).expect("two vertices");
    inflate(&base, &vec![len; paths])
}

/// `arcs` random arcs without loops on `n` vertices.
pub fn directed_random(rng: &mut impl Rng, n: usize, arcs: usize, max_weight: Weight) -> DiGraph {
    assert!(n >= 2, "need at least two vertices");
    let mut d = DiGraph::new(n);
    while d.arc_count() < arcs {
        let t = rng.gen_range(0..n);
        let h = rng.gen_range(0..n);
        if t != h {
            d.add_arc(t, h, rng.gen_range(0..=max_weight)).unwrap();
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inflated_bowtie_has_sixty_edges() {
        let g = chain_inflated(&named("bowtie").unwrap(), 10);
        assert_eq!(g.edge_count(), 60);
        assert_eq!(g.total_weight(), 60);
        assert!(g.is_connected());
        assert_eq!(g.degree_classes().v3plus, vec![2]);
    }

    #[test]
    fn theta_shape() {
        let g = theta(4, 2, 1);
        assert_eq!(g.edge_count(), 8);
        assert_eq!(g.degree(0), 4);
        assert_eq!(g.degree(1), 4);
    }

    #[test]
    fn seeded_generators_repeat() {
        let a = random_connected(&mut rng(7), 6, 9, 3);
        let b = random_connected(&mut rng(7), 6, 9, 3);
        assert_eq!(a, b);
        assert!(a.is_connected());
        assert_eq!(directed_random(&mut rng(7), 5, 8, 2), directed_random(&mut rng(7), 5, 8, 2));
    }
}
