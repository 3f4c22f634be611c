use kcpp::format::{
    parse_directed, parse_expansion, parse_instance, parse_solution, write_directed, write_expansion, write_instance,
    write_solution, DirectedInstance, Instance,
};
use kcpp_core::{kernelize, solve_kcpp, DiGraph, KernelConstants, KernelOutcome, MultiGraph, SolveOptions};
use proptest::prelude::*;

fn instance() -> impl Strategy<Value = Instance> {
    (2usize..8).prop_flat_map(|n| {
        let edges = proptest::collection::vec((0..n, 0..n, 0u64..1000), 1..12);
        (Just(n), edges, 1usize..5, proptest::option::of(0u64..5000)).prop_map(|(n, edges, k, budget)| {
            let mut graph = MultiGraph::new(n);
            for (u, v, w) in edges {
                if u != v {
                    graph.add_edge(u, v, w).unwrap();
                }
            }
            Instance { graph, k, budget }
        })
    })
}

fn connected(max_n: usize) -> impl Strategy<Value = MultiGraph> {
    (2..=max_n).prop_flat_map(|n| {
        let parents = proptest::collection::vec(any::<prop::sample::Index>(), n - 1);
        let extra = proptest::collection::vec((0..n, 0..n, 0u64..5), 0..4);
        (parents, extra).prop_map(move |(parents, extra)| {
            let mut g = MultiGraph::new(n);
            for (i, p) in parents.iter().enumerate() {
                g.add_edge(p.index(i + 1), i + 1, 1 + i as u64 % 3).unwrap();
            }
            for (u, v, w) in extra {
                if u != v {
                    g.add_edge(u, v, w).unwrap();
                }
            }
            g
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn instances_round_trip(inst in instance()) {
        prop_assume!(inst.graph.edge_count() > 0);
        let text = write_instance(&inst);
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(write_instance(&back), text);
    }

    #[test]
    fn solutions_round_trip(g in connected(6), k in 1usize..4) {
        let out = solve_kcpp(&g, k, None, &SolveOptions::default()).unwrap();
        let text = write_solution(&out.solution, k);
        let (back, k2) = parse_solution(&text).unwrap();
        prop_assert_eq!(k2, k);
        prop_assert_eq!(&back, &out.solution);
        prop_assert_eq!(write_solution(&back, k), text);
    }

    #[test]
    fn expansions_round_trip(g in connected(5), k in 1usize..3) {
        let kz = kernelize(&g, k, &KernelConstants::default()).unwrap();
        if let KernelOutcome::Reduced(r) = kz.outcome {
            let text = write_expansion(&r.expansion);
            prop_assert_eq!(parse_expansion(&text).unwrap(), r.expansion);
        }
    }

    #[test]
    fn directed_round_trip(arcs in proptest::collection::vec((0usize..5, 0usize..5, 0u64..9), 0..10), k in 1usize..4) {
        let mut d = DiGraph::new(5);
        for (t, h, w) in arcs {
            if t != h {
                d.add_arc(t, h, w).unwrap();
            }
        }
        let inst = DirectedInstance { digraph: d, k };
        let text = write_directed(&inst);
        let back = parse_directed(&text).unwrap();
        prop_assert_eq!(write_directed(&back), text);
        prop_assert_eq!(back.digraph, inst.digraph);
    }
}
