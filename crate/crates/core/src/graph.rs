//! Finite weighted graphs `(b, c, m)` and their validation.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::vertex::Vertex;

/// Relative slack below which a degree surplus over the realized edge sum is
/// treated as roundoff rather than weight leaving the realization.
const OUTER_REL_EPS: f64 = 1e-12;

/// A finite realization of a weighted graph.
///
/// Vertices are stored in canonical (sorted) order and addressed by index.
/// `degree` may exceed the sum of the stored edge weights: the surplus is the
/// weight of edges to vertices outside this realization (the boundary degree).
#[derive(Clone, Debug)]
pub struct WeightedGraph {
    vertices: Vec<Vertex>,
    index: HashMap<Vertex, usize>,
    adj: Vec<Vec<(usize, f64)>>,
    degree: Vec<f64>,
    outer: Vec<f64>,
    killing: Vec<f64>,
    measure: Vec<f64>,
}

impl WeightedGraph {
    pub fn builder() -> GraphBuilder {
        GraphBuilder::default()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &Vertex {
        &self.vertices[i]
    }

    pub fn index_of(&self, v: &Vertex) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn require(&self, v: &Vertex) -> Result<usize> {
        self.index_of(v).ok_or_else(|| Error::UnknownVertex(v.clone()))
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        self.index.contains_key(v)
    }

    /// Realized neighbors of vertex `i`, sorted by index.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adj[i]
    }

    /// b(x, y) for realized vertices (0 when absent).
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        match self.adj[i].binary_search_by_key(&j, |&(k, _)| k) {
            Ok(pos) => self.adj[i][pos].1,
            Err(_) => 0.0,
        }
    }

    /// Full weighted degree, including weight to unrealized vertices.
    pub fn degree(&self, i: usize) -> f64 {
        self.degree[i]
    }

    /// Weight of edges from `i` to vertices outside the realization.
    pub fn boundary_degree(&self, i: usize) -> f64 {
        self.outer[i]
    }

    /// True when every neighbor of `i` is realized.
    pub fn is_closed(&self, i: usize) -> bool {
        self.outer[i] == 0.0
    }

    pub fn killing(&self, i: usize) -> f64 {
        self.killing[i]
    }

    pub fn measure(&self, i: usize) -> f64 {
        self.measure[i]
    }

    /// Number of stored directed adjacency entries (twice the edge count for
    /// a symmetric graph).
    pub fn half_edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    /// Undirected edges `(i, j, b)` with `i < j`, in canonical order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().filter(move |&&(j, _)| j > i).map(move |&(j, w)| (i, j, w)))
    }

    /// Same graph with the measure replaced pointwise.
    pub fn with_measure(&self, mut measure: impl FnMut(&Vertex, f64) -> f64) -> WeightedGraph {
        let mut g = self.clone();
        for (i, v) in self.vertices.iter().enumerate() {
            g.measure[i] = measure(v, self.measure[i]);
        }
        g
    }

    /// Connected components over b-positive edges, each sorted; components are
    /// ordered by their smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        // treat stored half-edges as undirected so asymmetric input still works
        let mut undirected: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, row) in self.adj.iter().enumerate() {
            for &(j, w) in row {
                if w > 0.0 {
                    undirected[i].push(j);
                    undirected[j].push(i);
                }
            }
        }
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                for &y in &undirected[x] {
                    if !seen[y] {
                        seen[y] = true;
                        comp.push(y);
                        queue.push_back(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// Builds a [`WeightedGraph`]. Never fails: malformed data is kept so that
/// [`validate`] can report it.
#[derive(Clone, Debug, Default)]
pub struct GraphBuilder {
    vertices: BTreeMap<Vertex, (f64, f64)>,
    half_edges: Vec<(Vertex, Vertex, f64)>,
    degrees: HashMap<Vertex, f64>,
}

impl GraphBuilder {
    /// Declares a vertex with measure `m` and killing `c`.
    pub fn vertex(&mut self, v: Vertex, m: f64, c: f64) -> &mut Self {
        self.vertices.insert(v, (m, c));
        self
    }

    pub fn has_vertex(&self, v: &Vertex) -> bool {
        self.vertices.contains_key(v)
    }

    /// Adds the undirected edge `{x, y}` with weight `b`. Undeclared endpoints
    /// default to `m = 1`, `c = 0`.
    pub fn edge(&mut self, x: Vertex, y: Vertex, b: f64) -> &mut Self {
        self.half_edge(x.clone(), y.clone(), b);
        if x != y {
            self.half_edge(y, x, b);
        }
        self
    }

    /// Adds only the entry b(x, y). Used for realizations coming from an oracle
    /// and for constructing deliberately asymmetric test data.
    pub fn half_edge(&mut self, x: Vertex, y: Vertex, b: f64) -> &mut Self {
        for v in [&x, &y] {
            if !self.vertices.contains_key(v) {
                self.vertices.insert(v.clone(), (1.0, 0.0));
            }
        }
        self.half_edges.push((x, y, b));
        self
    }

    /// Sets the full weighted degree of `v`, including weight to vertices that
    /// are not part of this realization.
    pub fn degree(&mut self, v: Vertex, deg: f64) -> &mut Self {
        self.degrees.insert(v, deg);
        self
    }

    pub fn build(&self) -> WeightedGraph {
        let vertices: Vec<Vertex> = self.vertices.keys().cloned().collect();
        let index: HashMap<Vertex, usize> = vertices.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        let n = vertices.len();
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (x, y, w) in &self.half_edges {
            adj[index[x]].push((index[y], *w));
        }
        for row in &mut adj {
            // stable: on duplicate half-edges the first one wins
            row.sort_by_key(|&(j, _)| j);
            row.dedup_by_key(|&mut (j, _)| j);
        }
        let realized: Vec<f64> = adj.iter().map(|row| row.iter().map(|&(_, w)| w).sum()).collect();
        let mut degree = realized.clone();
        let mut outer = vec![0.0; n];
        for (v, &d) in &self.degrees {
            let i = index[v];
            degree[i] = d;
            let surplus = d - realized[i];
            if surplus > OUTER_REL_EPS * d.abs() {
                outer[i] = surplus;
            }
        }
        let (measure, killing) = self.vertices.values().map(|&(m, c)| (m, c)).unzip();
        WeightedGraph {
            vertices,
            index,
            adj,
            degree,
            outer,
            killing,
            measure,
        }
    }
}

/// The invariant a [`Violation`] breaks.
#[derive(Clone, Debug, PartialEq)]
pub enum Rule {
    Symmetry { forward: f64, backward: f64 },
    SelfLoop,
    EdgeWeight(f64),
    Measure(f64),
    Killing(f64),
    Degree { degree: f64, realized: f64 },
    DuplicateEdge,
    DuplicateVertex,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub rule: Rule,
    pub vertex: Vertex,
    pub other: Option<Vertex>,
}

impl Violation {
    pub fn at(rule: Rule, vertex: Vertex) -> Self {
        Violation {
            rule,
            vertex,
            other: None,
        }
    }

    pub fn at_pair(rule: Rule, x: Vertex, y: Vertex) -> Self {
        Violation {
            rule,
            vertex: x,
            other: Some(y),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let loc = match &self.other {
            Some(y) => format!("({},{})", self.vertex, y),
            None => self.vertex.to_string(),
        };
        match &self.rule {
            Rule::Symmetry { forward, backward } => {
                write!(f, "symmetry violation at {loc}: b(x,y)={forward} b(y,x)={backward}")
            }
            Rule::SelfLoop => write!(f, "self-loop violation at {loc}"),
            Rule::EdgeWeight(w) => write!(f, "edge weight violation at {loc}: b={w} must be positive and finite"),
            Rule::Measure(m) => write!(f, "measure positivity violation at {loc}: m={m}"),
            Rule::Killing(c) => write!(f, "killing violation at {loc}: c={c} must be nonnegative and finite"),
            Rule::Degree { degree, realized } => {
                write!(
                    f,
                    "degree violation at {loc}: deg={degree} is below the realized edge sum {realized}"
                )
            }
            Rule::DuplicateEdge => write!(f, "duplicate edge at {loc}"),
            Rule::DuplicateVertex => write!(f, "duplicate vertex declaration at {loc}"),
        }
    }
}

/// Checks every structural invariant; an empty list means the graph is valid.
pub fn validate(g: &WeightedGraph) -> Vec<Violation> {
    let mut out = Vec::new();
    for i in 0..g.len() {
        let x = g.vertex(i);
        let m = g.measure(i);
        if !(m > 0.0 && m.is_finite()) {
            out.push(Violation::at(Rule::Measure(m), x.clone()));
        }
        let c = g.killing(i);
        if !(c >= 0.0 && c.is_finite()) {
            out.push(Violation::at(Rule::Killing(c), x.clone()));
        }
        let mut realized = 0.0;
        for &(j, w) in g.neighbors(i) {
            realized += w;
            let y = g.vertex(j);
            if i == j {
                out.push(Violation::at(Rule::SelfLoop, x.clone()));
                continue;
            }
            if !(w > 0.0 && w.is_finite()) {
                out.push(Violation::at_pair(Rule::EdgeWeight(w), x.clone(), y.clone()));
            }
            let back = g.weight(j, i);
            // report each asymmetric pair once, from its smaller endpoint
            if back != w && (i < j || back == 0.0) {
                out.push(Violation::at_pair(
                    Rule::Symmetry {
                        forward: w,
                        backward: back,
                    },
                    x.clone(),
                    y.clone(),
                ));
            }
        }
        let d = g.degree(i);
        if !d.is_finite() || d < realized - OUTER_REL_EPS * realized.abs() {
            out.push(Violation::at(Rule::Degree { degree: d, realized }, x.clone()));
        }
    }
    out
}

/// True iff every pair of vertices is joined by a path of b-positive edges.
/// Killing plays no role.
pub fn is_connected(g: &WeightedGraph) -> bool {
    g.components().len() <= 1
}
