#![allow(dead_code)]

use kcpp_core::{MultiGraph, Weight};

/// Connected simple graphs on exactly `n` vertices with at most `max_edges`
/// edges, one per isomorphism class, as edge lists sorted by endpoints.
pub fn connected_graphs(n: usize, max_edges: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let perms = permutations(n);
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        if mask.count_ones() as usize > max_edges || (n > 1 && (mask.count_ones() as usize) < n - 1) {
            continue;
        }
        let edges: Vec<(usize, usize)> =
            pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
        if edges.is_empty() || !connected(n, &edges) {
            continue;
        }
        let canon = perms
            .iter()
            .map(|p| {
                let mut e: Vec<(usize, usize)> =
                    edges.iter().map(|&(u, v)| (p[u].min(p[v]), p[u].max(p[v]))).collect();
                e.sort_unstable();
                e
            })
            .min()
            .unwrap();
        if seen.insert(canon.clone()) {
            out.push(canon);
        }
    }
    out
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

pub fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for &(u, v) in edges {
            for (a, b) in [(u, v), (v, u)] {
                if a == x && !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
    }
    seen.iter().all(|&s| s)
}

/// Every assignment of weights from `values` to `m` edges.
pub fn weightings(m: usize, values: &[Weight]) -> Vec<Vec<Weight>> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|w| {
                values.iter().map(move |&x| {
                    let mut w = w.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

pub fn build(n: usize, edges: &[(usize, usize)], weights: &[Weight]) -> MultiGraph {
    let e: Vec<_> = edges.iter().zip(weights).map(|(&(u, v), &w)| (u, v, w)).collect();
    MultiGraph::from_edges(n, &e).unwrap()
}

pub fn unit(n: usize, edges: &[(usize, usize)]) -> MultiGraph {
    build(n, edges, &vec![1; edges.len()])
}

pub fn bowtie() -> MultiGraph {
    unit(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)])
}

pub fn triangle() -> MultiGraph {
    unit(3, &[(0, 1), (1, 2), (2, 0)])
}

pub fn k4() -> MultiGraph {
    unit(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
}
