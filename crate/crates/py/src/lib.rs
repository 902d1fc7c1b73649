//! Python bindings.
//!
//! Vertices cross the boundary as `int`, tuples of `int`, or `str` (strings
//! are parsed with the same rules as graph files, so `"(0,1)"` works too).
//! Vertex functions are `dict`s from vertex to `float`. Results come back as
//! plain dicts so they print and pickle without ceremony.

use std::sync::Arc;

use dirichlet_graph::classify::WITNESS_SIGN_TOL;
use dirichlet_graph::io::{fmt_num, parse_graph, read_graph_file, write_graph, ParsedGraph};
use dirichlet_graph::{
    ball, capacity_sequence, check_green_criterion, check_uniqueness_witness, classify_recurrence,
    classify_stochastic_completeness, deficiency_sequence, energy, equilibrium_potential, formal_laplacian, generate,
    green_defect, resolvent_limit, validate, ClassificationReport, Error, FiniteOracle, GraphOracle, GreenMode,
    PotentialOptions, Vertex, VertexFunction, WeightedGraph,
};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList, PyTuple};

create_exception!(
    dirichlet_graph,
    GraphError,
    PyException,
    "Input the library cannot work with."
);
create_exception!(
    dirichlet_graph,
    NumericalError,
    GraphError,
    "A solve failed or a result failed its own consistency check."
);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        Error::InvalidArgument(_) | Error::UnknownFamily(_) | Error::Parse { .. } => {
            PyValueError::new_err(e.to_string())
        }
        Error::Singular { .. } | Error::NonFinite(_) | Error::NotConverged { .. } | Error::Inconsistent(_) => {
            NumericalError::new_err(e.to_string())
        }
        _ => GraphError::new_err(e.to_string()),
    }
}

trait OrPy<T> {
    fn or_py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for dirichlet_graph::Result<T> {
    fn or_py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

fn vertex_from(obj: &Bound<'_, PyAny>) -> PyResult<Vertex> {
    if let Ok(s) = obj.extract::<String>() {
        return s.parse().or_py();
    }
    if obj.is_instance_of::<pyo3::types::PyBool>() {
        return Err(PyValueError::new_err("booleans are not vertex ids"));
    }
    if let Ok(n) = obj.extract::<i64>() {
        return Ok(Vertex::Int(n));
    }
    if let Ok(t) = obj.cast::<PyTuple>() {
        let coords: Vec<i64> = t.extract()?;
        return Ok(Vertex::tuple(&coords));
    }
    Err(PyValueError::new_err(format!(
        "vertex ids are int, tuple of int or str, got {}",
        obj.get_type().name()?
    )))
}

fn vertex_to<'py>(py: Python<'py>, v: &Vertex) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Vertex::Int(n) => n.into_pyobject(py)?.into_any(),
        Vertex::Tuple(c) => PyTuple::new(py, c.iter())?.into_any(),
        Vertex::Label(s) => s.as_ref().into_pyobject(py)?.into_any(),
    })
}

fn function_from(obj: &Bound<'_, PyAny>) -> PyResult<VertexFunction> {
    let d = obj.cast::<PyDict>()?;
    let mut f = VertexFunction::new();
    for (k, v) in d.iter() {
        f.set(vertex_from(&k)?, v.extract::<f64>()?);
    }
    Ok(f)
}

fn function_to<'py>(py: Python<'py>, f: &VertexFunction) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for (v, x) in f.iter() {
        d.set_item(vertex_to(py, v)?, x)?;
    }
    Ok(d)
}

fn vertices_to<'py>(py: Python<'py>, vs: &[Vertex]) -> PyResult<Bound<'py, PyList>> {
    let items = vs.iter().map(|v| vertex_to(py, v)).collect::<PyResult<Vec<_>>>()?;
    PyList::new(py, items)
}

fn options(threads: usize) -> PotentialOptions {
    PotentialOptions {
        threads: threads.max(1),
        ..Default::default()
    }
}

/// A (possibly infinite) weighted graph, explored lazily through balls.
#[pyclass(frozen, module = "dirichlet_graph")]
struct Graph {
    oracle: Arc<dyn GraphOracle>,
    label: String,
}

impl Graph {
    fn origin(&self, origin: Option<&Bound<'_, PyAny>>) -> PyResult<Vertex> {
        let o = match origin {
            Some(o) => vertex_from(o)?,
            None => self.oracle.default_origin(),
        };
        if !self.oracle.contains(&o) {
            return Err(to_py(Error::UnknownVertex(o)));
        }
        Ok(o)
    }

    fn finite(parsed: ParsedGraph, label: String) -> PyResult<Self> {
        let oracle = FiniteOracle::new(parsed.into_valid().or_py()?, "file");
        Ok(Graph {
            oracle: Arc::new(oracle),
            label,
        })
    }
}

#[pymethods]
impl Graph {
    /// A member of a built-in family, e.g. `"lattice:2"` or
    /// `"path_chain:beta=2,mu=1/2"`.
    #[staticmethod]
    fn generate(spec: &str) -> PyResult<Self> {
        Ok(Graph {
            oracle: Arc::from(generate(spec).or_py()?),
            label: spec.to_string(),
        })
    }

    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        Graph::finite(read_graph_file(path).or_py()?, format!("file:{path}"))
    }

    /// Graph-file text. Raises ValueError on the first violation.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Graph::finite(parse_graph(text).or_py()?, "text".into())
    }

    #[getter]
    fn family(&self) -> String {
        self.oracle.meta().family.clone()
    }

    #[getter]
    fn default_origin<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        vertex_to(py, &self.oracle.default_origin())
    }

    /// None when the family does not say.
    #[getter]
    fn connected(&self) -> Option<bool> {
        self.oracle.meta().connected
    }

    fn __contains__(&self, v: &Bound<'_, PyAny>) -> PyResult<bool> {
        Ok(self.oracle.contains(&vertex_from(v)?))
    }

    fn neighbors<'py>(&self, py: Python<'py>, v: &Bound<'py, PyAny>) -> PyResult<Vec<(Bound<'py, PyAny>, f64)>> {
        let v = vertex_from(v)?;
        if !self.oracle.contains(&v) {
            return Err(to_py(Error::UnknownVertex(v)));
        }
        self.oracle
            .neighbors(&v)
            .iter()
            .map(|(y, w)| Ok((vertex_to(py, y)?, *w)))
            .collect()
    }

    fn measure(&self, v: &Bound<'_, PyAny>) -> PyResult<f64> {
        Ok(self.oracle.measure(&vertex_from(v)?))
    }

    fn killing(&self, v: &Bound<'_, PyAny>) -> PyResult<f64> {
        Ok(self.oracle.killing(&vertex_from(v)?))
    }

    #[pyo3(signature = (radius, origin=None))]
    fn ball(&self, radius: usize, origin: Option<&Bound<'_, PyAny>>) -> PyResult<Realization> {
        let o = self.origin(origin)?;
        let b = ball(self.oracle.as_ref(), &o, radius).or_py()?;
        Ok(Realization {
            interior: b.interior(),
            graph: b.realization,
        })
    }

    fn __repr__(&self) -> String {
        format!("Graph({:?})", self.label)
    }
}

/// A finite graph: a ball of some family, or a whole finite graph.
#[pyclass(frozen, module = "dirichlet_graph")]
struct Realization {
    graph: WeightedGraph,
    interior: Vec<Vertex>,
}

impl Realization {
    fn index(&self, v: &Bound<'_, PyAny>) -> PyResult<usize> {
        self.graph.require(&vertex_from(v)?).or_py()
    }
}

#[pymethods]
impl Realization {
    fn __len__(&self) -> usize {
        self.graph.len()
    }

    fn __contains__(&self, v: &Bound<'_, PyAny>) -> PyResult<bool> {
        Ok(self.graph.contains(&vertex_from(v)?))
    }

    /// Vertices in canonical order.
    fn vertices<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        vertices_to(py, self.graph.vertices())
    }

    /// Vertices all of whose neighbors are realized.
    fn interior<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        vertices_to(py, &self.interior)
    }

    /// Full weighted degree, edges leaving the realization included.
    fn degree(&self, v: &Bound<'_, PyAny>) -> PyResult<f64> {
        Ok(self.graph.degree(self.index(v)?))
    }

    fn measure(&self, v: &Bound<'_, PyAny>) -> PyResult<f64> {
        Ok(self.graph.measure(self.index(v)?))
    }

    fn killing(&self, v: &Bound<'_, PyAny>) -> PyResult<f64> {
        Ok(self.graph.killing(self.index(v)?))
    }

    fn laplacian<'py>(&self, py: Python<'py>, u: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyDict>> {
        function_to(py, &formal_laplacian(&self.graph, &function_from(u)?).or_py()?)
    }

    /// Energy Q(u), boundary and killing terms included.
    fn energy(&self, u: &Bound<'_, PyAny>) -> PyResult<f64> {
        Ok(energy(&self.graph, &function_from(u)?).or_py()?.total)
    }

    /// Q(u, v) - sum of (Lu)v m for v supported on the interior. Zero up to
    /// roundoff.
    fn green_defect(&self, u: &Bound<'_, PyAny>, v: &Bound<'_, PyAny>) -> PyResult<f64> {
        green_defect(&self.graph, &function_from(u)?, &function_from(v)?).or_py()
    }

    #[pyo3(signature = (u, question="recurrence"))]
    fn green<'py>(&self, py: Python<'py>, u: &Bound<'py, PyAny>, question: &str) -> PyResult<Bound<'py, PyDict>> {
        let mode = match question {
            "recurrence" => GreenMode::Recurrence,
            "sc" => GreenMode::StochasticCompleteness,
            _ => return Err(PyValueError::new_err("question is 'recurrence' or 'sc'")),
        };
        let r = check_green_criterion(&self.graph, &function_from(u)?, mode, None).or_py()?;
        let d = PyDict::new(py);
        d.set_item("boundary_sum", r.boundary_sum)?;
        d.set_item("l1_u", r.l1_u)?;
        d.set_item("l1_laplacian", r.l1_laplacian)?;
        d.set_item("sup_u", r.sup_u)?;
        d.set_item("interior_supported", r.interior_supported)?;
        let contributions = PyDict::new(py);
        for (v, c) in &r.contributions {
            contributions.set_item(vertex_to(py, v)?, c)?;
        }
        d.set_item("contributions", contributions)?;
        d.set_item("notes", r.notes)?;
        Ok(d)
    }

    /// The conditions u >= 0, Lu <= 0, Lu != 0 and their integrability
    /// companions. Passing them all on a ball refutes nothing.
    fn witness<'py>(&self, py: Python<'py>, u: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyDict>> {
        let r = check_uniqueness_witness(&self.graph, &function_from(u)?).or_py()?;
        let d = PyDict::new(py);
        let checks = PyDict::new(py);
        for (name, ok) in &r.checks {
            checks.set_item(*name, *ok)?;
        }
        d.set_item("checks", checks)?;
        d.set_item("all_pass", r.all_pass())?;
        d.set_item("boundary_sum", r.boundary_sum_value)?;
        d.set_item("sign_tol", WITNESS_SIGN_TOL)?;
        d.set_item("notes", r.notes)?;
        Ok(d)
    }

    /// Violations of symmetry, sign and degree rules; empty when valid.
    fn validate(&self) -> Vec<String> {
        validate(&self.graph).iter().map(ToString::to_string).collect()
    }

    /// Graph-file text.
    fn to_text(&self) -> String {
        write_graph(&self.graph)
    }

    fn __repr__(&self) -> String {
        format!(
            "Realization({} vertices, {} interior)",
            self.graph.len(),
            self.interior.len()
        )
    }
}

/// Equilibrium potential of the origin on the ball of the given radius.
#[pyfunction]
#[pyo3(signature = (graph, radius, origin=None))]
fn capacity<'py>(
    py: Python<'py>,
    graph: &Graph,
    radius: usize,
    origin: Option<&Bound<'py, PyAny>>,
) -> PyResult<Bound<'py, PyDict>> {
    let o = graph.origin(origin)?;
    let oracle = graph.oracle.as_ref();
    let e = py
        .detach(|| equilibrium_potential(oracle, &o, radius, &options(1)))
        .or_py()?;
    let d = PyDict::new(py);
    d.set_item("radius", e.radius)?;
    d.set_item("capacity", e.capacity)?;
    d.set_item("flux_capacity", e.flux_capacity)?;
    d.set_item("min_laplacian", e.min_laplacian)?;
    d.set_item("ball_size", e.ball_size)?;
    d.set_item("iterations", e.iterations)?;
    d.set_item("potential", function_to(py, &e.potential)?)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (graph, radii, origin=None, tol=1e-3, threads=1))]
fn capacities<'py>(
    py: Python<'py>,
    graph: &Graph,
    radii: Vec<usize>,
    origin: Option<&Bound<'py, PyAny>>,
    tol: f64,
    threads: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let o = graph.origin(origin)?;
    let oracle = graph.oracle.as_ref();
    let s = py
        .detach(|| capacity_sequence(oracle, &o, &radii, tol, &options(threads)))
        .or_py()?;
    let d = PyDict::new(py);
    d.set_item("radii", &s.radii)?;
    d.set_item("values", &s.values)?;
    d.set_item("flux_values", &s.flux_values)?;
    d.set_item("min_laplacians", &s.min_laplacians)?;
    d.set_item("limit_estimate", s.limit_estimate)?;
    d.set_item("stabilized", s.stabilized())?;
    Ok(d)
}

/// 1 - alpha (L_n + alpha)^-1 1 at each probe (default: the origin) for
/// every radius.
#[pyfunction]
#[pyo3(signature = (graph, radii, alpha=1.0, origin=None, probes=None, tol=1e-3, threads=1))]
#[allow(clippy::too_many_arguments)]
fn deficiency<'py>(
    py: Python<'py>,
    graph: &Graph,
    radii: Vec<usize>,
    alpha: f64,
    origin: Option<&Bound<'py, PyAny>>,
    probes: Option<Vec<Bound<'py, PyAny>>>,
    tol: f64,
    threads: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let o = graph.origin(origin)?;
    let probes = probes
        .unwrap_or_default()
        .iter()
        .map(vertex_from)
        .collect::<PyResult<Vec<_>>>()?;
    let oracle = graph.oracle.as_ref();
    let s = py
        .detach(|| deficiency_sequence(oracle, &o, alpha, &radii, &probes, tol, &options(threads)))
        .or_py()?;
    let d = PyDict::new(py);
    d.set_item("alpha", s.alpha)?;
    d.set_item("radii", &s.radii)?;
    d.set_item("probes", vertices_to(py, &s.probe_vertices)?)?;
    d.set_item("deficiencies", &s.deficiencies)?;
    d.set_item("stabilized", s.stabilized())?;
    Ok(d)
}

/// (L_n + alpha)^-1 f along the exhaustion. `data` defaults to the indicator
/// of the origin and must live inside the smallest ball.
#[pyfunction]
#[pyo3(signature = (graph, radii, data=None, alpha=1.0, origin=None, probes=None, threads=1))]
#[allow(clippy::too_many_arguments)]
fn resolvent<'py>(
    py: Python<'py>,
    graph: &Graph,
    radii: Vec<usize>,
    data: Option<&Bound<'py, PyAny>>,
    alpha: f64,
    origin: Option<&Bound<'py, PyAny>>,
    probes: Option<Vec<Bound<'py, PyAny>>>,
    threads: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let o = graph.origin(origin)?;
    let f = match data {
        Some(d) => function_from(d)?,
        None => VertexFunction::indicator(o.clone()),
    };
    let probes = match probes {
        Some(p) => p.iter().map(vertex_from).collect::<PyResult<Vec<_>>>()?,
        None => vec![o.clone()],
    };
    let oracle = graph.oracle.as_ref();
    let t = py
        .detach(|| resolvent_limit(oracle, &o, alpha, &f, &radii, &probes, &options(threads)))
        .or_py()?;
    let d = PyDict::new(py);
    d.set_item("alpha", t.alpha)?;
    d.set_item("radii", &t.radii)?;
    d.set_item("probes", vertices_to(py, &t.probes)?)?;
    d.set_item("values", &t.values)?;
    d.set_item("solution", function_to(py, &t.solution)?)?;
    Ok(d)
}

fn report_to<'py>(py: Python<'py>, r: &ClassificationReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("question", r.question.to_string())?;
    d.set_item("verdict", r.verdict.to_string())?;
    d.set_item("radii", r.evidence.radii())?;
    d.set_item("values", r.evidence.values())?;
    d.set_item("connected", r.connected)?;
    d.set_item("tol", r.thresholds.tol)?;
    d.set_item("notes", &r.notes)?;
    Ok(d)
}

/// Three-valued verdict ("positive", "negative", "undetermined") on
/// recurrence or stochastic completeness ("sc").
#[pyfunction]
#[pyo3(signature = (graph, question, radii=vec![4, 8, 16, 32], origin=None, tol=1e-3, alpha=1.0, threads=1))]
#[allow(clippy::too_many_arguments)]
fn classify<'py>(
    py: Python<'py>,
    graph: &Graph,
    question: &str,
    radii: Vec<usize>,
    origin: Option<&Bound<'py, PyAny>>,
    tol: f64,
    alpha: f64,
    threads: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let o = graph.origin(origin)?;
    let oracle = graph.oracle.as_ref();
    let opts = options(threads);
    let report = match question {
        "recurrence" => py.detach(|| classify_recurrence(oracle, &o, &radii, tol, &opts)),
        "sc" => py.detach(|| classify_stochastic_completeness(oracle, &o, alpha, &radii, tol, &opts)),
        _ => return Err(PyValueError::new_err("question is 'recurrence' or 'sc'")),
    }
    .or_py()?;
    report_to(py, &report)
}

/// Violations found in graph-file text; empty when the graph is valid.
#[pyfunction]
fn validate_text(text: &str) -> PyResult<Vec<String>> {
    let parsed = parse_graph(text).or_py()?;
    Ok(parsed.violations().iter().map(ToString::to_string).collect())
}

/// Shortest round-tripping decimal form, as used in CLI output.
#[pyfunction]
fn format_number(x: f64) -> String {
    fmt_num(x)
}

#[pymodule(name = "dirichlet_graph")]
fn dirichlet_graph_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Graph>()?;
    m.add_class::<Realization>()?;
    m.add_function(wrap_pyfunction!(capacity, m)?)?;
    m.add_function(wrap_pyfunction!(capacities, m)?)?;
    m.add_function(wrap_pyfunction!(deficiency, m)?)?;
    m.add_function(wrap_pyfunction!(resolvent, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(validate_text, m)?)?;
    m.add_function(wrap_pyfunction!(format_number, m)?)?;
    m.add("GraphError", m.py().get_type::<GraphError>())?;
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
