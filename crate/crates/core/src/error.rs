use crate::graph::{EdgeId, Vertex};

/// Reasons a candidate [`Solution`](crate::Solution) is rejected by
/// [`verify_solution`](crate::verify_solution).
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error("expected {expected} walks, found {found}")]
    WrongWalkCount { expected: usize, found: usize },
    #[error("walk {walk} is empty")]
    EmptyWalk { walk: usize },
    #[error("walk {walk} step {step} uses unknown edge {edge}")]
    UnknownEdge { walk: usize, step: usize, edge: EdgeId },
    #[error("walk {walk} step {step}: edge {edge} does not connect the listed vertices")]
    BrokenAdjacency { walk: usize, step: usize, edge: EdgeId },
    #[error("walk {walk} does not return to its start vertex")]
    NotClosed { walk: usize },
    #[error("edge {0} is not covered by any walk")]
    Uncovered(EdgeId),
    #[error("claimed total weight {claimed} but walks weigh {actual}")]
    WeightMismatch { claimed: u64, actual: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for a graph with {vertex_count} vertices")]
    VertexOutOfRange { vertex: Vertex, vertex_count: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("vertex {vertex} has degree {degree}, expected 2")]
    NotDegreeTwo { vertex: Vertex, degree: usize },
    #[error("bypassing vertex {0} would create a self-loop")]
    BypassLoop(Vertex),
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph has no edges")]
    NoEdges,
    #[error("k must be at least 1")]
    ZeroK,
    #[error("terminal set has odd size {0}")]
    OddTerminalCount(usize),
    #[error("vertex {0} has odd degree")]
    OddDegree(Vertex),
    #[error("start vertex {0} has no incident edge copies")]
    StartNotInComponent(Vertex),
    #[error("instance has {size} units, limit is {limit}")]
    SizeLimit { size: usize, limit: usize },
    #[error("search budget of {0} nodes exhausted")]
    BudgetExceeded(u64),
    #[error("packing is not contained in the multigraph: {0}")]
    InvalidPacking(&'static str),
    #[error("weights may overflow 64 bits")]
    WeightOverflow,
    #[error("graph is a single cycle; it has no path multigraph")]
    BareCycle,
    #[error("expansion map does not match the kernel: {0}")]
    ExpansionMismatch(&'static str),
    #[error("invalid kernel constants: {0}")]
    InvalidConstants(&'static str),
    #[error("internal consistency error: {0}")]
    Internal(&'static str),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
