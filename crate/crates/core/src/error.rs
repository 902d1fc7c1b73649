use thiserror::Error;

use crate::vertex::Vertex;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("vertex {0} is not in the graph")]
    UnknownVertex(Vertex),

    #[error("function support escapes the graph at vertex {0}")]
    SupportEscapes(Vertex),

    #[error("vertex {vertex} has neighbors outside the realization (escaping weight {weight})")]
    NotInterior { vertex: Vertex, weight: f64 },

    #[error("oracle returned {len} neighbors for vertex {vertex} (limit {limit})")]
    NeighborLimit { vertex: Vertex, len: usize, limit: usize },

    #[error("ball exceeds the vertex limit of {limit}")]
    VertexLimit { limit: usize },

    #[error("oracle is inconsistent: {0}")]
    Oracle(String),

    #[error("unknown graph family {0:?}")]
    UnknownFamily(String),

    #[error("singular system: component containing {vertex} ({size} vertices) touches no Dirichlet boundary")]
    Singular { vertex: Vertex, size: usize },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
