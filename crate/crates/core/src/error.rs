use thiserror::Error;

/// Errors produced by graph parsing and the combinatorial computations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("duplicate vertex id {0}")]
    DuplicateVertex(u64),

    #[error("edge references unknown vertex id {0}")]
    UnknownVertex(u64),

    #[error("root {0} is not a declared vertex")]
    UnknownRoot(u64),

    #[error("edge {0}-{1} is not in the graph")]
    MissingEdge(u64, u64),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("intersection matrix is not negative definite")]
    NotNegativeDefinite,

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("vertex {0} is not a leaf")]
    NotALeaf(u64),

    #[error("vertex {0} is not a node (valency >= 3)")]
    NotANode(u64),

    #[error("graph has no node; use the string base case")]
    StringGraph,

    #[error("graph has adjacent nodes; separate them first")]
    AdjacentNodes,

    #[error("group profile mismatch: {0:?} vs {1:?}")]
    ProfileMismatch(Vec<String>, Vec<String>),

    #[error("value {0} does not fit the machine range needed for enumeration")]
    CapacityExceeded(String),

    #[error("weight-level cap of {0} exceeded during gap enumeration")]
    LevelCapExceeded(u64),

    #[error("semigroup condition fails at node {node} toward edge {node}-{neighbor}")]
    SemigroupConditionFails { node: u64, neighbor: u64 },

    #[error("congruence condition fails at node {0}")]
    CongruenceConditionFails(u64),

    #[error("distinguished character of the part rooted at {0} is not in its value semigroup")]
    QhatNotInSemigroup(u64),

    #[error("json: {0}")]
    Json(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
