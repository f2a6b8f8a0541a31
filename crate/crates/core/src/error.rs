use thiserror::Error;

use crate::simplex::{FacetId, Simplex, VertexId};

/// Errors raised by mesh and multimesh construction, navigation and
/// operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeshError {
    #[error("unsupported mesh dimension {0} (expected 0..=3)")]
    Dimension(usize),
    #[error("facet {facet} has {got} vertices, expected {expected}")]
    FacetArity {
        facet: usize,
        got: usize,
        expected: usize,
    },
    #[error("facet {facet} references unknown vertex {vertex}")]
    UnknownVertex { facet: usize, vertex: u32 },
    #[error("facet {facet} repeats vertex {vertex}")]
    RepeatedVertex { facet: usize, vertex: u32 },
    #[error("simplex {0} is not alive in this mesh")]
    StaleSimplex(Simplex),
    #[error("facet {0} is not alive")]
    StaleFacet(FacetId),
    #[error("vertex {0} is not alive")]
    StaleVertex(VertexId),
    #[error("expected an edge, got {0}")]
    NotAnEdge(Simplex),
    #[error("switch at level {level} crosses the boundary face {face}")]
    Boundary { level: usize, face: Simplex },
    #[error("switch level {level} out of range for dimension {dim}")]
    SwitchLevel { level: usize, dim: usize },
    #[error("link condition fails for edge {0}")]
    LinkCondition(Simplex),
    #[error("edge {0} has no operation to perform: {1}")]
    Precondition(Simplex, &'static str),
    #[error("rollback is stale: recorded for generation {recorded}, mesh is at {current}")]
    StaleRollback { recorded: u64, current: u64 },
    #[error("missing attribute `{0}`")]
    MissingAttribute(String),
    #[error("attribute `{name}` expects {expected} values, got {got}")]
    AttributeWidth {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("attribute `{0}` already exists")]
    DuplicateAttribute(String),
    #[error("unknown multimesh node {0}")]
    UnknownNode(usize),
    #[error("node {target} is not on the root path of node {node}")]
    NotAncestor { node: usize, target: usize },
    #[error("child dimension {child} exceeds parent dimension {parent}")]
    DimensionOrder { child: usize, parent: usize },
    #[error("facet counts differ: parent {parent}, child {child}")]
    FacetCountMismatch { parent: usize, child: usize },
    #[error("containment map construction failed at {witness}: {reason}")]
    Construction { witness: Simplex, reason: String },
    #[error("anchor of child facet {0} is broken")]
    BrokenAnchor(FacetId),
    #[error("invariant `{0}` failed")]
    Invariant(String),
}
