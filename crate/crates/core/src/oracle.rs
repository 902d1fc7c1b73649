//! Lazy access to (possibly infinite) graphs.

use crate::error::{Error, Result};
use crate::graph::{is_connected, WeightedGraph};
use crate::vertex::Vertex;

/// Descriptive data attached to an oracle by whoever constructed it.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OracleMeta {
    pub family: String,
    pub params: Vec<(String, String)>,
    /// Whether every infinite path has infinite measure. Certified by the
    /// generator when it can be; never computed.
    pub condition_a: Option<bool>,
    /// Whether the whole graph is connected, when known.
    pub connected: Option<bool>,
    /// Number of vertices for finite families.
    pub vertex_count: Option<usize>,
}

/// Neighbor/measure/killing provider for a graph `(b, c)` with measure `m`.
///
/// Implementations must be pure and symmetric: `y` is listed among the
/// neighbors of `x` with weight `w` iff `x` is listed among those of `y` with
/// the same weight. Self-loops are not allowed.
pub trait GraphOracle: Send + Sync {
    fn meta(&self) -> &OracleMeta;

    fn contains(&self, v: &Vertex) -> bool;

    /// Complete neighbor list of `v`.
    fn neighbors(&self, v: &Vertex) -> Vec<(Vertex, f64)>;

    fn measure(&self, v: &Vertex) -> f64;

    fn killing(&self, v: &Vertex) -> f64;

    /// Full weighted degree when it differs from the sum over `neighbors`,
    /// i.e. when `v` has edges leaving the oracle's own vertex universe.
    fn degree(&self, _v: &Vertex) -> Option<f64> {
        None
    }

    /// Preferred origin for this family.
    fn default_origin(&self) -> Vertex;
}

/// Oracle over an explicit finite graph.
#[derive(Clone, Debug)]
pub struct FiniteOracle {
    graph: WeightedGraph,
    meta: OracleMeta,
}

impl FiniteOracle {
    pub fn new(graph: WeightedGraph, family: &str) -> Self {
        let meta = OracleMeta {
            family: family.to_string(),
            params: Vec::new(),
            // no infinite paths in a finite graph
            condition_a: Some(true),
            connected: Some(is_connected(&graph)),
            vertex_count: Some(graph.len()),
        };
        FiniteOracle { graph, meta }
    }

    pub(crate) fn meta_mut(&mut self) -> &mut OracleMeta {
        &mut self.meta
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    fn idx(&self, v: &Vertex) -> Option<usize> {
        self.graph.index_of(v)
    }
}

impl GraphOracle for FiniteOracle {
    fn meta(&self) -> &OracleMeta {
        &self.meta
    }

    fn contains(&self, v: &Vertex) -> bool {
        self.graph.contains(v)
    }

    fn neighbors(&self, v: &Vertex) -> Vec<(Vertex, f64)> {
        match self.idx(v) {
            Some(i) => self
                .graph
                .neighbors(i)
                .iter()
                .map(|&(j, w)| (self.graph.vertex(j).clone(), w))
                .collect(),
            None => Vec::new(),
        }
    }

    fn measure(&self, v: &Vertex) -> f64 {
        self.idx(v).map_or(1.0, |i| self.graph.measure(i))
    }

    fn killing(&self, v: &Vertex) -> f64 {
        self.idx(v).map_or(0.0, |i| self.graph.killing(i))
    }

    fn degree(&self, v: &Vertex) -> Option<f64> {
        self.idx(v).map(|i| self.graph.degree(i))
    }

    fn default_origin(&self) -> Vertex {
        self.graph.vertices().first().cloned().unwrap_or(Vertex::Int(0))
    }
}

/// Returns an error unless `origin` belongs to the oracle's universe.
pub fn require_vertex(oracle: &dyn GraphOracle, origin: &Vertex) -> Result<()> {
    if oracle.contains(origin) {
        Ok(())
    } else {
        Err(Error::UnknownVertex(origin.clone()))
    }
}
