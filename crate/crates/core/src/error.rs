use thiserror::Error;

/// Errors raised by the library.
///
/// Variants split into two families: input/precondition violations, which a
/// caller can fix by changing parameters, and numerical failures (see
/// [`Error::is_numerical`]).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vertex {vertex} out of range (hypergraph has {num_vertices} vertices)")]
    VertexOutOfRange { vertex: usize, num_vertices: usize },

    #[error("vertex {vertex} repeated inside edge {edge:?}")]
    RepeatedVertex { vertex: usize, edge: Vec<usize> },

    #[error("edge multiset to remove is not contained in the hypergraph: {edge:?}")]
    EdgeNotPresent { edge: Vec<usize> },

    #[error("edge id {edge_id} out of range ({num_edges} edges)")]
    EdgeIdOutOfRange { edge_id: usize, num_edges: usize },

    #[error("hypergraph is not {k}-uniform: edge {edge_id} has size {size}")]
    NotUniform { k: usize, edge_id: usize, size: usize },

    #[error("exact enumeration needs at most {limit} vertices, got {num_vertices}")]
    EnumerationGuard { num_vertices: usize, limit: usize },

    #[error("vertex {vertex} is occupied with probability 1; occupation ratio is infinite")]
    SaturatedMarginal { vertex: usize },

    #[error("tree exceeds the node cap of {cap}")]
    TreeTooLarge { cap: usize },

    #[error("not a linear hypertree")]
    NotLinearHypertree,

    #[error("invalid ordering: {0}")]
    InvalidOrder(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "outside the contraction certificate: (k-1)*zeta*c^(k-1) = {value} must be < e"
    )]
    ContractionCondition { value: f64 },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("bisection bracket failure: {0}")]
    Bracket(String),

    #[error("graph too large for this operation: {0}")]
    GraphTooLarge(String),

    #[error("automorphism count does not divide the copy count: {0}")]
    Divisibility(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// True for failures of an iterative method rather than of its inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotConverged { .. } | Error::Bracket(_) | Error::Divisibility(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
