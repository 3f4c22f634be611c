//! Exact solving and kernelization for the k-Chinese Postman Problem: cover
//! every edge of a weighted multigraph with at least k closed walks of
//! minimum total weight.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod cpp;
pub mod cycles;
pub mod directed;
mod error;
pub mod graph;
pub mod kcpp;
pub mod kernel;
pub mod matching;

pub use cpp::{euler_tour, min_weight_join, odd_vertices, solve_cpp, CppSolution, Join, Multiplicities};
pub use cycles::{
    exact_max_cycle_packing, greedy_cycle_packing, packing_at_least, shortest_cycle, Cycle, CyclePacking,
    DEFAULT_PACKING_LIMIT,
};
pub use directed::{
    build_balanced_extension, max_arc_disjoint_cycles, verify_packing_equivalence, DiGraph, EquivalenceReport,
    GadgetResult,
};
pub use error::{Error, Result, VerifyError};
pub use graph::{verify_solution, Bypass, DegreeClasses, Edge, EdgeId, MultiGraph, Solution, Vertex, Walk, Weight};
pub use kcpp::{
    oracle_kcpp, oracle_solution, solve_kcpp, solve_kcpp_exact, split_into_k_walks, ExactSolution, KcppOutcome,
    OracleGate, OracleResult, RestrictedDuplication, Route, SolveOptions,
};
pub use kernel::{
    apply_reduction_rule, build_path_multigraph, kernelize, lift_solution, packing_shortcut, parallel_edge_shortcut,
    pendant_shortcut, ExpansionMap, KernelConstants, KernelOutcome, KernelReport, Kernelization, ReducedInstance,
    Shortcut,
};
